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
#include "cli/commands.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "model/checkpoint.hpp"

namespace ipl {
namespace fs = std::filesystem;

void write_files_atomically(const std::vector<std::pair<std::string, std::string>> &files) {
  std::vector<std::string> staged;
  auto discard = [&] {
    std::error_code ec;
    for (const auto &p : staged) fs::remove(p, ec);
  };
  try {
    for (const auto &[path, bytes] : files) {
      const fs::path target(path);
      if (target.has_parent_path()) fs::create_directories(target.parent_path());
      const std::string tmp = path + ".tmp";
      staged.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      out.close();
      if (!out) throw IoError("cannot write " + path);
    }
    for (std::size_t i = 0; i < files.size(); ++i) fs::rename(staged[i], files[i].first);
  } catch (const fs::filesystem_error &e) {
    discard();
    throw IoError(e.what());
  } catch (...) {
    discard();
    throw;
  }
}

RunResult cmd_run(const ExperimentConfig &cfg) {
  const Benchmark bench = make_benchmark(cfg);
  RunResult result = run_experiment(cfg, bench);
  const fs::path dir(cfg.out);
  write_files_atomically({{(dir / "report.json").string(), report_to_json(result)},
                          {(dir / "report.csv").string(), report_to_csv(result)},
                          {(dir / "checkpoint.bin").string(), encode_checkpoint(model_to_tensors(result.base))}});
  spdlog::info("wrote report.json, report.csv and checkpoint.bin to {}", cfg.out);
  return result;
}

std::vector<AblationCell> cmd_ablate(const ExperimentConfig &cfg) {
  const Benchmark bench = make_benchmark(cfg);
  auto cells = run_ablation(cfg, bench);
  const fs::path dir(cfg.out);
  write_files_atomically({{(dir / "ablation.csv").string(), ablation_to_csv(cells)}});
  spdlog::info("wrote ablation.csv to {}", cfg.out);
  return cells;
}

ReportSummary cmd_report(const std::string &report_path, const std::string &plot_path, std::string &table) {
  std::ifstream in(report_path, std::ios::binary);
  if (!in) throw IoError("cannot read report " + report_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  ReportSummary summary = parse_report_json(ss.str());
  table = format_report_table(summary);
  std::string plot = plot_path;
  if (plot.empty()) plot = (fs::path(report_path).parent_path() / "accuracy.dat").string();
  write_files_atomically({{plot, format_plot_data(summary)}});
  return summary;
}

void cmd_generate_data(const ExperimentConfig &cfg, const std::string &path) {
  cfg.validate();
  const Dataset data = load_experiment_data(cfg);
  const std::string tmp = path + ".tmp";
  try {
    save_csv(data, tmp);
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return 1;
    case ErrorKind::kData:
    case ErrorKind::kFormat:
    case ErrorKind::kIo: return 2;
    default: return 3;
  }
}

void set_log_level(std::string_view level) {
  static bool sink_ready = false;
  if (!sink_ready) {
    auto logger = spdlog::stderr_logger_st("ipl");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    sink_ready = true;
  }
  if (level == "quiet") {
    spdlog::set_level(spdlog::level::warn);
  } else if (level == "info" || level.empty()) {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    throw ConfigError("unknown log level '" + std::string(level) + "' (expected quiet, info or debug)");
  }
}

}  // namespace ipl
