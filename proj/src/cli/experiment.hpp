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
#ifndef IPL_CLI_EXPERIMENT_HPP_
#define IPL_CLI_EXPERIMENT_HPP_

#include <string>
#include <vector>

#include "cli/experiment_config.hpp"
#include "data/dataset.hpp"
#include "data/schedule.hpp"
#include "model/model.hpp"
#include "pipeline/sessions.hpp"

namespace ipl {

// Generated data uses derive_seed(seed, "data"); csv data is read as is.
Dataset load_experiment_data(const ExperimentConfig &cfg);

// Class split and shot draw use derive_seed(seed, "schedule").
SessionSchedule make_schedule(const ExperimentConfig &cfg, const Dataset &data);

struct Benchmark {
  Dataset data;
  SessionSchedule schedule;
};
Benchmark make_benchmark(const ExperimentConfig &cfg);

// cfg.train with the top-level seed and the data dimension applied.
TrainConfig effective_train_config(const ExperimentConfig &cfg);
ModelConfig effective_model_config(const ExperimentConfig &cfg, const Dataset &data);

struct RunResult {
  ExperimentConfig config;
  Model base;
  RepeatedReport report;
  std::vector<int> base_classes;
  std::vector<int> incremental_classes;  // every class added after session 1
  // Share of base-class test samples predicted as an incremental class at
  // the last session, one entry per trial.
  std::vector<double> final_misassigned;
};

RunResult run_experiment(const ExperimentConfig &cfg, const Benchmark &bench);
// Reuses an already trained base model (must come from the same config).
RunResult run_experiment(const ExperimentConfig &cfg, const Benchmark &bench, const Model &base);

struct AblationVariant {
  std::string name;
  bool ress = false;
  bool sppr = false;
  bool ft = false;
  AltMode alt = AltMode::kNone;
};

// RESS off/on x {SPPR, FT, SPPR+FT}, then zero/random/mean updates with RESS on.
const std::vector<AblationVariant> &ablation_variants();

ExperimentConfig apply_variant(const ExperimentConfig &cfg, const AblationVariant &v);

struct AblationCell {
  AblationVariant variant;
  RunResult result;
};

// One base model per RESS setting, shared by the variants that use it.
std::vector<AblationCell> run_ablation(const ExperimentConfig &cfg, const Benchmark &bench);

}  // namespace ipl

#endif  // IPL_CLI_EXPERIMENT_HPP_
