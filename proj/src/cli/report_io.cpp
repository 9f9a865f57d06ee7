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
#include "cli/report_io.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>

#include "numerics/error.hpp"

namespace ipl {
namespace {

using nlohmann::json;

json confusion_json(const ConfusionMatrix &m) {
  json rows = json::array();
  for (const auto &r : m) rows.push_back(r);
  return rows;
}

std::string csv_bool(bool b) { return b ? "1" : "0"; }

}  // namespace

std::string report_to_json(const RunResult &result) {
  const RepeatedReport &rep = result.report;
  json doc;
  doc["schema"] = "ipl.report.v1";

  json cfg = json::object();
  for (const auto &[k, v] : result.config.entries()) {
    if (k != "out") cfg[k] = v;
  }
  doc["config"] = cfg;
  doc["seed"] = result.config.seed;
  doc["trial_seeds"] = rep.seeds;
  doc["base_classes"] = result.base_classes;
  doc["incremental_classes"] = result.incremental_classes;

  const std::size_t sessions = rep.mean_accuracy.size();
  json sess = json::array();
  json confusion = json::array();
  for (std::size_t s = 0; s < sessions; ++s) {
    const SessionMetrics &first = rep.trials.front().sessions[s];
    sess.push_back({{"session", s + 1},
                    {"classes", first.classes},
                    {"accuracy", rep.mean_accuracy[s]},
                    {"stddev", rep.stddev_accuracy[s]}});
    ConfusionMatrix total = first.confusion;
    for (std::size_t t = 1; t < rep.trials.size(); ++t) {
      const auto &m = rep.trials[t].sessions[s].confusion;
      for (std::size_t i = 0; i < total.size(); ++i)
        for (std::size_t j = 0; j < total[i].size(); ++j) total[i][j] += m[i][j];
    }
    confusion.push_back({{"session", s + 1}, {"classes", first.classes}, {"counts", confusion_json(total)}});
  }
  doc["sessions"] = sess;
  doc["accuracies"] = rep.mean_accuracy;
  doc["stddevs"] = rep.stddev_accuracy;
  doc["average"] = rep.average_accuracy;
  doc["average_stddev"] = rep.average_stddev;
  doc["confusion"] = confusion;

  // Similarity averaged over trials; the old class set of a session is the
  // same in every trial.
  json sim = json::array();
  if (!rep.trials.empty()) {
    const auto &first = rep.trials.front().similarity;
    for (std::size_t k = 0; k < first.size(); ++k) {
      std::vector<double> cosine(first[k].cosine.size(), 0.0);
      double mean = 0.0;
      for (const auto &trial : rep.trials) {
        for (std::size_t i = 0; i < cosine.size(); ++i) cosine[i] += trial.similarity[k].cosine[i];
        mean += trial.similarity[k].mean;
      }
      const double n = static_cast<double>(rep.trials.size());
      for (double &c : cosine) c /= n;
      sim.push_back(
          {{"session", first[k].session}, {"class_ids", first[k].class_ids}, {"cosine", cosine}, {"mean", mean / n}});
    }
  }
  doc["similarity"] = sim;

  double mis = 0.0;
  for (double m : result.final_misassigned) mis += m;
  doc["final_old_to_new"] = result.final_misassigned.empty() ? 0.0 : mis / result.final_misassigned.size();

  json trials = json::array();
  for (std::size_t t = 0; t < rep.trials.size(); ++t) {
    const MetricsReport &r = rep.trials[t];
    json conf = json::array();
    for (const auto &s : r.sessions) conf.push_back(confusion_json(s.confusion));
    json tsim = json::array();
    for (const auto &s : r.similarity) tsim.push_back({{"session", s.session}, {"cosine", s.cosine}, {"mean", s.mean}});
    trials.push_back({{"seed", r.seed},
                      {"accuracies", r.per_session_accuracy()},
                      {"average", r.average_accuracy},
                      {"final_old_to_new", result.final_misassigned.at(t)},
                      {"confusion", conf},
                      {"similarity", tsim}});
  }
  doc["trials"] = trials;
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const RunResult &result) {
  const RepeatedReport &rep = result.report;
  std::string out = "session,classes,accuracy,stddev";
  for (std::size_t t = 0; t < rep.trials.size(); ++t) out += ",trial_" + std::to_string(t);
  out += "\n";
  for (std::size_t s = 0; s < rep.mean_accuracy.size(); ++s) {
    out += std::to_string(s + 1) + "," + std::to_string(rep.trials.front().sessions[s].classes.size()) + "," +
           format_double(rep.mean_accuracy[s]) + "," + format_double(rep.stddev_accuracy[s]);
    for (const auto &trial : rep.trials) out += "," + format_double(trial.sessions[s].accuracy);
    out += "\n";
  }
  return out;
}

std::string ablation_to_csv(const std::vector<AblationCell> &cells) {
  std::string out = "variant,ress,sppr,ft,update,session,classes,accuracy,stddev,average,final_old_to_new\n";
  for (const auto &cell : cells) {
    const auto &v = cell.variant;
    const RepeatedReport &rep = cell.result.report;
    double mis = 0.0;
    for (double m : cell.result.final_misassigned) mis += m;
    mis /= static_cast<double>(std::max<std::size_t>(cell.result.final_misassigned.size(), 1));
    for (std::size_t s = 0; s < rep.mean_accuracy.size(); ++s) {
      out += v.name + "," + csv_bool(v.ress) + "," + csv_bool(v.sppr) + "," + csv_bool(v.ft) + "," +
             alt_mode_name(v.alt) + "," + std::to_string(s + 1) + "," +
             std::to_string(rep.trials.front().sessions[s].classes.size()) + "," + format_double(rep.mean_accuracy[s]) +
             "," + format_double(rep.stddev_accuracy[s]) + "," + format_double(rep.average_accuracy) + "," +
             format_double(mis) + "\n";
    }
  }
  return out;
}

ReportSummary parse_report_json(const std::string &text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception &e) {
    throw FormatError(std::string("report is not valid JSON: ") + e.what());
  }
  ReportSummary out;
  try {
    if (doc.at("schema").get<std::string>() != "ipl.report.v1") throw FormatError("unsupported report schema");
    out.accuracy = doc.at("accuracies").get<std::vector<double>>();
    out.stddev = doc.at("stddevs").get<std::vector<double>>();
    out.average = doc.at("average").get<double>();
    out.trials = doc.at("trials").size();
    for (const auto &s : doc.at("sessions")) out.classes.push_back(s.at("classes").size());
  } catch (const json::exception &e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
  if (out.accuracy.empty() || out.accuracy.size() != out.stddev.size() || out.accuracy.size() != out.classes.size()) {
    throw FormatError("malformed report: session arrays disagree in length");
  }
  return out;
}

std::string format_report_table(const ReportSummary &summary) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-8s %8s %10s %10s %10s\n", "session", "classes", "accuracy", "stddev", "delta");
  out += line;
  for (std::size_t s = 0; s < summary.accuracy.size(); ++s) {
    char delta[32];
    if (s == 0) {
      std::snprintf(delta, sizeof(delta), "%10s", "-");
    } else {
      std::snprintf(delta, sizeof(delta), "%+10.4f", summary.accuracy[s] - summary.accuracy[s - 1]);
    }
    std::snprintf(line, sizeof(line), "%-8zu %8zu %10.4f %10.4f %s\n", s + 1, summary.classes[s], summary.accuracy[s],
                  summary.stddev[s], delta);
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-8s %8s %10.4f\n", "average", "", summary.average);
  out += line;
  return out;
}

std::string format_plot_data(const ReportSummary &summary) {
  std::string out = "# session accuracy\n";
  for (std::size_t s = 0; s < summary.accuracy.size(); ++s) {
    out += std::to_string(s + 1) + " " + format_double(summary.accuracy[s]) + "\n";
  }
  return out;
}

}  // namespace ipl
