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
#include "cli/experiment.hpp"

#include <spdlog/spdlog.h>

#include <map>

#include "numerics/error.hpp"
#include "pipeline/training.hpp"

namespace ipl {

Dataset load_experiment_data(const ExperimentConfig &cfg) {
  if (cfg.data.source == "csv") {
    spdlog::info("loading {}", cfg.data.path);
    return load_csv(cfg.data.path);
  }
  Rng rng(derive_seed(cfg.seed, "data"));
  return generate_gaussian_mixture(cfg.data.classes, cfg.data.dim, cfg.data.samples_per_class, cfg.data.separation,
                                   cfg.data.noise, rng);
}

SessionSchedule make_schedule(const ExperimentConfig &cfg, const Dataset &data) {
  Rng rng(derive_seed(cfg.seed, "schedule"));
  return build_schedule(data, cfg.schedule, rng);
}

Benchmark make_benchmark(const ExperimentConfig &cfg) {
  cfg.validate();
  Benchmark b;
  b.data = load_experiment_data(cfg);
  b.schedule = make_schedule(cfg, b.data);
  spdlog::info("data: {} samples, {} classes, dim {}; {} sessions", b.data.size(), b.data.classes().size(),
               b.data.dim(), b.schedule.session_count());
  return b;
}

TrainConfig effective_train_config(const ExperimentConfig &cfg) {
  TrainConfig t = cfg.train;
  t.seed = cfg.seed;
  return t;
}

ModelConfig effective_model_config(const ExperimentConfig &cfg, const Dataset &data) {
  ModelConfig m = cfg.model;
  m.input_dim = data.dim();
  return m;
}

RunResult run_experiment(const ExperimentConfig &cfg, const Benchmark &bench) {
  cfg.validate();
  spdlog::info("training base session (ress={}, {} epochs)", cfg.train.episodic_enabled, cfg.train.epochs);
  const Model base = train_base_session(bench.schedule.base_train, effective_model_config(cfg, bench.data),
                                        effective_train_config(cfg));
  return run_experiment(cfg, bench, base);
}

RunResult run_experiment(const ExperimentConfig &cfg, const Benchmark &bench, const Model &base) {
  cfg.validate();
  RunResult out;
  out.config = cfg;
  out.base = base;
  out.report = run_repeated(bench.schedule, base, effective_train_config(cfg), cfg.trials);
  out.base_classes = bench.schedule.base_classes;
  for (const auto &inc : bench.schedule.increments) {
    out.incremental_classes.insert(out.incremental_classes.end(), inc.classes.begin(), inc.classes.end());
  }
  for (const auto &trial : out.report.trials) {
    out.final_misassigned.push_back(
        out.incremental_classes.empty()
            ? 0.0
            : misassigned_fraction(trial.sessions.back(), out.base_classes, out.incremental_classes));
    spdlog::debug("trial seed {:#x}: average {:.4f}", trial.seed, trial.average_accuracy);
  }
  spdlog::info("average accuracy {:.4f} over {} trial(s)", out.report.average_accuracy, cfg.trials);
  return out;
}

const std::vector<AblationVariant> &ablation_variants() {
  static const std::vector<AblationVariant> variants = {
      {"sppr", false, true, false, AltMode::kNone},      {"ft", false, false, true, AltMode::kNone},
      {"sppr+ft", false, true, true, AltMode::kNone},    {"ress+sppr", true, true, false, AltMode::kNone},
      {"ress+ft", true, false, true, AltMode::kNone},    {"ress+sppr+ft", true, true, true, AltMode::kNone},
      {"ress+zero", true, false, false, AltMode::kZero}, {"ress+random", true, false, false, AltMode::kRandom},
      {"ress+mean", true, false, false, AltMode::kMean},
  };
  return variants;
}

ExperimentConfig apply_variant(const ExperimentConfig &cfg, const AblationVariant &v) {
  ExperimentConfig c = cfg;
  c.train.episodic_enabled = v.ress;
  c.train.sppr_enabled = v.sppr;
  c.train.ft_enabled = v.ft;
  c.train.alt_mode = v.alt;
  return c;
}

std::vector<AblationCell> run_ablation(const ExperimentConfig &cfg, const Benchmark &bench) {
  std::map<bool, Model> bases;
  std::vector<AblationCell> cells;
  for (const auto &v : ablation_variants()) {
    const ExperimentConfig vc = apply_variant(cfg, v);
    vc.validate();
    auto it = bases.find(v.ress);
    if (it == bases.end()) {
      spdlog::info("training base session (ress={})", v.ress);
      it = bases
               .emplace(v.ress, train_base_session(bench.schedule.base_train, effective_model_config(vc, bench.data),
                                                   effective_train_config(vc)))
               .first;
    }
    spdlog::info("variant {}", v.name);
    cells.push_back({v, run_experiment(vc, bench, it->second)});
  }
  return cells;
}

}  // namespace ipl
