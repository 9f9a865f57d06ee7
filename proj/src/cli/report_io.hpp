/**
 * Copyright 2026 The IPL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef IPL_CLI_REPORT_IO_HPP_
#define IPL_CLI_REPORT_IO_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "cli/experiment.hpp"

namespace ipl {

// JSON report, schema "ipl.report.v1" (documented in docs/report-format.md).
std::string report_to_json(const RunResult &result);

// One row per session: session,classes,accuracy,stddev,trial_0,...
std::string report_to_csv(const RunResult &result);

// One row per variant per session.
std::string ablation_to_csv(const std::vector<AblationCell> &cells);

// The part of a JSON report the report command needs.
struct ReportSummary {
  std::vector<std::size_t> classes;  // per session
  std::vector<double> accuracy;      // per session, mean over trials
  std::vector<double> stddev;
  double average = 0.0;
  std::size_t trials = 0;
};

// FormatError on malformed or truncated JSON or missing fields.
ReportSummary parse_report_json(const std::string &text);

// Fixed-width table: one row per session, then the average.
std::string format_report_table(const ReportSummary &summary);

// "session accuracy" pairs, one per line, gnuplot-ready.
std::string format_plot_data(const ReportSummary &summary);

}  // namespace ipl

#endif  // IPL_CLI_REPORT_IO_HPP_
