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
// Command-line front end; talks to the library only through the C API.
#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ipl/ipl.h"

namespace {

struct ExperimentFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> trials;
  std::vector<std::string> sets;
};

void add_experiment_flags(CLI::App *cmd, ExperimentFlags &f) {
  cmd->add_option("--config", f.config_path, "key=value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--trials", f.trials, "number of shot draws to average over");
  cmd->add_option("--set", f.sets, "override one config key, e.g. --set train.epochs=20")->take_all();
}

int report_failure(ipl_status st) {
  std::fprintf(stderr, "ipl: %s\n", ipl_last_error());
  return static_cast<int>(st);
}

using ConfigPtr = std::unique_ptr<ipl_config, decltype(&ipl_config_destroy)>;

// Defaults, then the file, then --set overrides, then the dedicated flags.
ipl_status build_config(const ExperimentFlags &f, ConfigPtr &cfg) {
  ipl_config *raw = nullptr;
  ipl_status st = ipl_config_create(&raw);
  if (st != IPL_OK) return st;
  cfg.reset(raw);
  if (!f.config_path.empty() && (st = ipl_config_load_file(raw, f.config_path.c_str())) != IPL_OK) return st;
  for (const auto &s : f.sets) {
    if ((st = ipl_config_assign(raw, s.c_str())) != IPL_OK) return st;
  }
  if (f.seed && (st = ipl_config_set(raw, "seed", std::to_string(*f.seed).c_str())) != IPL_OK) return st;
  if (f.out && (st = ipl_config_set(raw, "out", f.out->c_str())) != IPL_OK) return st;
  if (f.trials && (st = ipl_config_set(raw, "trials", std::to_string(*f.trials).c_str())) != IPL_OK) return st;
  return ipl_config_validate(raw);
}

int print_report(const std::string &path, const std::string &plot_path) {
  ipl_report *raw = nullptr;
  ipl_status st = ipl_report_load(path.c_str(), &raw);
  if (st != IPL_OK) return report_failure(st);
  std::unique_ptr<ipl_report, decltype(&ipl_report_destroy)> report(raw, &ipl_report_destroy);
  size_t needed = 0;
  ipl_report_table(raw, nullptr, 0, &needed);
  std::string table(needed, '\0');
  if ((st = ipl_report_table(raw, table.data(), table.size(), &needed)) != IPL_OK) return report_failure(st);
  std::fputs(table.c_str(), stdout);
  std::string plot = plot_path;
  if (plot.empty()) plot = (std::filesystem::path(path).parent_path() / "accuracy.dat").string();
  if ((st = ipl_report_write_plot(raw, plot.c_str())) != IPL_OK) return report_failure(st);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Incremental prototype learning: training, sessions, ablations and reports"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ipl_version()));

  ExperimentFlags run_flags, ablate_flags, gen_flags;
  auto *run = app.add_subcommand("run", "train, run all sessions, write report.json/report.csv/checkpoint.bin");
  add_experiment_flags(run, run_flags);
  auto *ablate = app.add_subcommand("ablate", "run the update-method ablation grid, write ablation.csv");
  add_experiment_flags(ablate, ablate_flags);

  std::string report_path, plot_path;
  auto *report = app.add_subcommand("report", "print a per-session table and write plot data");
  report->add_option("report", report_path, "report.json produced by run")->required();
  report->add_option("--plot", plot_path, "plot data path (default: accuracy.dat next to the report)");

  std::string gen_path;
  auto *gen = app.add_subcommand("gen-data", "write the configured dataset as CSV");
  add_experiment_flags(gen, gen_flags);
  gen->add_option("--csv", gen_path, "output CSV path")->required();

  auto *show = app.add_subcommand("config", "print the effective configuration");
  ExperimentFlags show_flags;
  add_experiment_flags(show, show_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (ipl_status st = ipl_set_log_level(nullptr); st != IPL_OK) return report_failure(st);

  ConfigPtr cfg(nullptr, &ipl_config_destroy);
  if (run->parsed() || ablate->parsed() || gen->parsed() || show->parsed()) {
    const ExperimentFlags &f = run->parsed()      ? run_flags
                               : ablate->parsed() ? ablate_flags
                               : gen->parsed()    ? gen_flags
                                                  : show_flags;
    if (ipl_status st = build_config(f, cfg); st != IPL_OK) return report_failure(st);
  }

  ipl_status st = IPL_OK;
  if (run->parsed()) {
    st = ipl_run(cfg.get(), nullptr);
  } else if (ablate->parsed()) {
    st = ipl_ablate(cfg.get());
  } else if (gen->parsed()) {
    st = ipl_generate_data(cfg.get(), gen_path.c_str());
  } else if (show->parsed()) {
    size_t needed = 0;
    ipl_config_dump(cfg.get(), nullptr, 0, &needed);
    std::string text(needed, '\0');
    st = ipl_config_dump(cfg.get(), text.data(), text.size(), &needed);
    if (st == IPL_OK) std::fputs(text.c_str(), stdout);
  } else if (report->parsed()) {
    return print_report(report_path, plot_path);
  }
  return st == IPL_OK ? 0 : report_failure(st);
}
