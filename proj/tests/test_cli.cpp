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
#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/experiment.hpp"
#include "cli/experiment_config.hpp"
#include "cli/report_io.hpp"
#include "helpers.hpp"
#include "model/checkpoint.hpp"
#include "numerics/error.hpp"

using namespace ipl;
using nlohmann::json;

namespace {

const char *kSmallConfig = R"(# tiny experiment
data.classes = 8
data.dim = 6
data.samples_per_class = 20
schedule.base_classes = 4
schedule.ways = 2
schedule.shots = 3
schedule.sessions = 2
schedule.test_fraction = 0.3
model.hidden_dims = 16
model.embed_dim = 8
model.latent_dim = 8
train.epochs = 4
train.batch_size = 32
episode.n_way = 2
episode.k_shot = 3
episode.query_batch = 16
trials = 2
)";

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  apply_config_text(cfg, kSmallConfig, "small");
  return cfg;
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_SUITE("experiment config") {
  TEST_CASE("defaults") {
    const ExperimentConfig cfg;
    CHECK(cfg.get("seed") == "0");
    CHECK(cfg.get("trials") == "5");
    CHECK(cfg.get("model.hidden_dims") == "64,64");
    CHECK(cfg.get("refinement.mode") == "softmax");
    CHECK(cfg.get("refinement.temperature") == "0.0625");
    CHECK(cfg.get("train.alt_mode") == "none");
    CHECK_NOTHROW(cfg.validate());
  }

  TEST_CASE("every key round trips through get and set") {
    const ExperimentConfig cfg = small_config();
    for (const std::string &key : ExperimentConfig::keys()) {
      ExperimentConfig copy;
      copy.set(key, cfg.get(key));
      CHECK(copy.get(key) == cfg.get(key));
    }
    ExperimentConfig back;
    apply_config_text(back, config_to_text(cfg), "dump");
    CHECK(config_to_text(back) == config_to_text(cfg));
  }

  TEST_CASE("parsing") {
    ExperimentConfig cfg;
    apply_config_text(cfg, "  train.lr=0.5   # trailing comment\n\ntrain.ress = off\nmodel.hidden_dims = none\n", "x");
    CHECK(cfg.train.lr == 0.5);
    CHECK_FALSE(cfg.train.episodic_enabled);
    CHECK(cfg.model.hidden_dims.empty());
    cfg.set("train.sppr", "yes");
    CHECK(cfg.train.sppr_enabled);
    CHECK(split_assignment("a.b=c=d") == std::pair<std::string, std::string>{"a.b", "c=d"});
    CHECK_THROWS_AS(split_assignment("novalue"), ConfigError);
  }

  TEST_CASE("errors name key and line") {
    ExperimentConfig cfg;
    CHECK_THROWS_AS(cfg.set("train.learning_rate", "1"), ConfigError);
    CHECK_THROWS_AS(cfg.set("train.epochs", "-3"), ConfigError);
    CHECK_THROWS_AS(cfg.set("train.epochs", "3x"), ConfigError);
    CHECK_THROWS_AS(cfg.set("train.ress", "maybe"), ConfigError);
    CHECK_THROWS_AS(cfg.get("nope"), ConfigError);
    try {
      apply_config_text(cfg, "seed = 1\nbogus.key = 2\n", "exp.cfg");
      FAIL("expected an error");
    } catch (const ConfigError &e) {
      CHECK(std::string(e.what()).find("exp.cfg:2") != std::string::npos);
      CHECK(std::string(e.what()).find("bogus.key") != std::string::npos);
    }
    CHECK_THROWS_AS(apply_config_text(cfg, "just words\n", "f"), ConfigError);
    CHECK_THROWS_AS(apply_config_file(cfg, "/nonexistent/exp.cfg"), IoError);
  }

  TEST_CASE("validation") {
    ExperimentConfig cfg;
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.data.source = "csv";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.set("refinement.temperature", "0");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.set("train.sppr", "false");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }

  TEST_CASE("shortest double formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  }
}

TEST_SUITE("experiment") {
  TEST_CASE("benchmark follows the seed") {
    ExperimentConfig a = small_config(), b = small_config();
    CHECK(make_benchmark(a).data.features().same_values(make_benchmark(b).data.features()));
    b.seed = 1;
    CHECK_FALSE(make_benchmark(a).data.features().same_values(make_benchmark(b).data.features()));
  }

  TEST_CASE("csv source") {
    const auto dir = testing::scratch_dir("cli_csv");
    ExperimentConfig cfg = small_config();
    cmd_generate_data(cfg, (dir / "d.csv").string());
    ExperimentConfig from_csv = small_config();
    from_csv.set("data.source", "csv");
    from_csv.set("data.path", (dir / "d.csv").string());
    const Dataset a = load_experiment_data(cfg), b = load_experiment_data(from_csv);
    CHECK(a.features().same_values(b.features()));
    CHECK(a.labels() == b.labels());
    CHECK(effective_model_config(from_csv, b).input_dim == 6);
  }

  TEST_CASE("run result") {
    const ExperimentConfig cfg = small_config();
    const RunResult r = run_experiment(cfg, make_benchmark(cfg));
    CHECK(r.report.trials.size() == 2);
    CHECK(r.base_classes.size() == 4);
    CHECK(r.incremental_classes.size() == 4);
    CHECK(r.final_misassigned.size() == 2);
    CHECK(effective_train_config(cfg).seed == cfg.seed);
  }

  TEST_CASE("ablation grid") {
    const ExperimentConfig cfg = small_config();
    const Benchmark bench = make_benchmark(cfg);
    const auto cells = run_ablation(cfg, bench);
    REQUIRE(cells.size() == ablation_variants().size());
    CHECK(cells.size() == 9);
    const std::string csv = ablation_to_csv(cells);
    const auto lines = lines_of(csv);
    CHECK(lines.front() == "variant,ress,sppr,ft,update,session,classes,accuracy,stddev,average,final_old_to_new");
    CHECK(lines.size() == 1 + 9 * 3);
    // a shared base model gives exactly what a standalone run gives
    for (std::size_t i : {std::size_t{3}, std::size_t{7}}) {
      const RunResult alone = run_experiment(apply_variant(cfg, cells[i].variant), bench);
      CHECK(alone.report.mean_accuracy == cells[i].result.report.mean_accuracy);
      CHECK(report_to_json(alone) == report_to_json(cells[i].result));
    }
  }
}

TEST_SUITE("reports") {
  TEST_CASE("json and csv content") {
    const ExperimentConfig cfg = small_config();
    const RunResult r = run_experiment(cfg, make_benchmark(cfg));
    const json j = json::parse(report_to_json(r));
    CHECK(j["schema"] == "ipl.report.v1");
    CHECK(j["sessions"].size() == 3);
    CHECK(j["trials"].size() == 2);
    CHECK(j["accuracies"].size() == 3);
    CHECK(j["config"].contains("train.epochs"));
    CHECK_FALSE(j["config"].contains("out"));
    CHECK(j["average"].get<double>() == r.report.average_accuracy);
    CHECK(j["sessions"][2]["classes"].size() == 8);
    for (const auto &c : j["confusion"]) {
      std::int64_t total = 0;
      for (const auto &row : c["counts"])
        for (const auto &v : row) total += v.get<std::int64_t>();
      const std::size_t session = c["session"];
      CHECK(total == static_cast<std::int64_t>(2 * make_benchmark(cfg).schedule.cumulative_test(session).size()));
    }
    const auto lines = lines_of(report_to_csv(r));
    CHECK(lines.front() == "session,classes,accuracy,stddev,trial_0,trial_1");
    CHECK(lines.size() == 4);

    const ReportSummary s = parse_report_json(report_to_json(r));
    CHECK(s.accuracy == r.report.mean_accuracy);
    CHECK(s.classes == std::vector<std::size_t>{4, 6, 8});
    CHECK(s.trials == 2);
    const auto table = lines_of(format_report_table(s));
    CHECK(table.size() == 1 + 3 + 1);
    CHECK(table.back().rfind("average", 0) == 0);
    const auto plot = lines_of(format_plot_data(s));
    CHECK(plot.size() == 4);
    CHECK(plot[1].rfind("1 ", 0) == 0);
  }

  TEST_CASE("malformed reports") {
    const ExperimentConfig cfg = small_config();
    const std::string text = report_to_json(run_experiment(cfg, make_benchmark(cfg)));
    CHECK_THROWS_AS(parse_report_json(text.substr(0, text.size() / 2)), FormatError);
    CHECK_THROWS_AS(parse_report_json("{}"), FormatError);
    CHECK_THROWS_AS(parse_report_json(R"({"schema":"ipl.report.v1","sessions":"x"})"), FormatError);
  }
}

TEST_SUITE("commands") {
  TEST_CASE("run writes report, csv and a loadable checkpoint; reruns are byte identical") {
    const auto dir = testing::scratch_dir("cmd_run");
    ExperimentConfig cfg = small_config();
    cfg.out = (dir / "a").string();
    const RunResult r = cmd_run(cfg);
    cfg.out = (dir / "b").string();
    cmd_run(cfg);
    for (const char *name : {"report.json", "report.csv", "checkpoint.bin"}) {
      CHECK(std::filesystem::exists(dir / "a" / name));
      CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
    }
    const Model base = model_from_tensors(load_checkpoint((dir / "a" / "checkpoint.bin").string()));
    CHECK(base.bank.prototypes().same_values(r.base.bank.prototypes()));

    std::string table;
    const ReportSummary s = cmd_report((dir / "a" / "report.json").string(), "", table);
    CHECK(std::filesystem::exists(dir / "a" / "accuracy.dat"));
    CHECK(lines_of(table).size() == 5);
    CHECK(s.average == r.report.average_accuracy);
    CHECK_THROWS_AS(cmd_report((dir / "missing.json").string(), "", table), IoError);
  }

  TEST_CASE("ablate writes one row per variant and session") {
    const auto dir = testing::scratch_dir("cmd_ablate");
    ExperimentConfig cfg = small_config();
    cfg.out = dir.string();
    cmd_ablate(cfg);
    CHECK(lines_of(slurp(dir / "ablation.csv")).size() == 1 + 9 * 3);
  }

  TEST_CASE("a failed write leaves no target behind") {
    const auto dir = testing::scratch_dir("atomic");
    std::ofstream(dir / "blocker") << "x";
    const std::string first = (dir / "first.txt").string();
    const std::string second = (dir / "blocker" / "second.txt").string();
    CHECK_THROWS_AS(write_files_atomically({{first, "one"}, {second, "two"}}), IoError);
    CHECK_FALSE(std::filesystem::exists(first));
    CHECK_FALSE(std::filesystem::exists(first + ".tmp"));
    write_files_atomically({{first, "one"}});
    CHECK(slurp(first) == "one");
  }

  TEST_CASE("exit codes and log levels") {
    CHECK(exit_code_for(ErrorKind::kConfig) == 1);
    CHECK(exit_code_for(ErrorKind::kData) == 2);
    CHECK(exit_code_for(ErrorKind::kFormat) == 2);
    CHECK(exit_code_for(ErrorKind::kIo) == 2);
    CHECK(exit_code_for(ErrorKind::kNumeric) == 3);
    CHECK_NOTHROW(set_log_level("quiet"));
    CHECK_THROWS_AS(set_log_level("loud"), ConfigError);
  }
}
