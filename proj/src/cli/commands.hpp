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
#ifndef IPL_CLI_COMMANDS_HPP_
#define IPL_CLI_COMMANDS_HPP_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cli/experiment.hpp"
#include "cli/report_io.hpp"
#include "numerics/error.hpp"

namespace ipl {

// Writes every file to a temporary sibling first and renames only after all
// writes succeeded, so a failure leaves none of the targets behind.
void write_files_atomically(const std::vector<std::pair<std::string, std::string>> &files);

// Trains, runs all trials and writes <out>/report.json, report.csv and
// checkpoint.bin (the trained base-session model).
RunResult cmd_run(const ExperimentConfig &cfg);

// Writes <out>/ablation.csv.
std::vector<AblationCell> cmd_ablate(const ExperimentConfig &cfg);

// Reads a JSON report and writes the plot data next to it (or to plot_path
// when non-empty). Returns the summary; `table` receives the text table.
ReportSummary cmd_report(const std::string &report_path, const std::string &plot_path, std::string &table);

// Writes the configured dataset as CSV.
void cmd_generate_data(const ExperimentConfig &cfg, const std::string &path);

// 0 ok, 1 usage/config, 2 data (including io and format), 3 internal.
int exit_code_for(ErrorKind kind);

// quiet | info | debug. ConfigError otherwise.
void set_log_level(std::string_view level);

}  // namespace ipl

#endif  // IPL_CLI_COMMANDS_HPP_
