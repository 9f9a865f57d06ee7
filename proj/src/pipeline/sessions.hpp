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

#ifndef IPL_PIPELINE_SESSIONS_HPP_
#define IPL_PIPELINE_SESSIONS_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "data/dataset.hpp"
#include "data/schedule.hpp"
#include "model/model.hpp"
#include "numerics/rng.hpp"
#include "pipeline/config.hpp"

namespace ipl {

using ConfusionMatrix = std::vector<std::vector<std::int64_t>>;

struct SessionMetrics {
  std::size_t session = 0;
  std::vector<int> classes;  // row/column order of the confusion matrix
  double accuracy = 0.0;
  ConfusionMatrix confusion;  // [true][predicted]
};

// Cosine between each old class's prototype before and after a session's
// update.
struct PrototypeSimilarity {
  std::size_t session = 0;
  std::vector<int> class_ids;
  std::vector<double> cosine;
  double mean = 0.0;
};

struct MetricsReport {
  std::vector<SessionMetrics> sessions;
  double average_accuracy = 0.0;
  std::vector<PrototypeSimilarity> similarity;
  std::uint64_t seed = 0;

  std::vector<double> per_session_accuracy() const;
};

struct RepeatedReport {
  std::vector<MetricsReport> trials;
  std::vector<double> mean_accuracy;    // per session
  std::vector<double> stddev_accuracy;  // per session, population
  double average_accuracy = 0.0;
  double average_stddev = 0.0;
  std::vector<std::uint64_t> seeds;
};

// Per-class mean embeddings of a few-shot set, classes ascending.
std::pair<Tensor, std::vector<int>> few_shot_means(const BackboneParams &backbone, const Dataset &few_shot);

// Embeds the few-shot set, averages per class and refines every prototype.
// Fine-tunes afterwards when cfg.ft_enabled. Gradient-free otherwise.
Model absorb_session(const Model &model, const Dataset &few_shot, const TrainConfig &cfg);

// New classes start at their class means; then ft_steps full-batch SGD steps
// of cross-entropy on the few-shot samples over all prototypes (and the
// backbone when cfg.ft_backbone).
Model finetune_baseline(const Model &model, const Dataset &few_shot, const TrainConfig &cfg);

// Old prototypes untouched; new rows are zero, a fresh init draw, or the
// given class means. Appended after the old rows.
PrototypeBank alt_update(const PrototypeBank &bank, const Tensor &new_means, std::span<const int> new_ids, AltMode mode,
                         Rng &rng);

// Applies whichever update cfg selects.
Model update_session(const Model &model, const Dataset &few_shot, const TrainConfig &cfg, Rng &rng);

// Argmax over cosine logits against every prototype of the bank.
SessionMetrics evaluate(const Model &model, const Dataset &test, const std::vector<int> &class_order);

PrototypeSimilarity prototype_similarity(const PrototypeBank &before, const PrototypeBank &after);

double mean_of(std::span<const double> values);

// Sessions >= 2 on an already trained base model. The runner only hands the
// few-shot train split to the update step; test sets are used for scoring.
MetricsReport run_increments(const SessionSchedule &schedule, const Model &base_model, const TrainConfig &cfg,
                             std::uint64_t trial_seed);

// Trains session 1 and runs every increment.
MetricsReport run_sessions(const SessionSchedule &schedule, const ModelConfig &model_cfg, const TrainConfig &cfg);

// Shares one base model; trial 0 uses the schedule's shots, trial t >= 1
// redraws them with derive_seed(seed, "trial", t).
RepeatedReport run_repeated(const SessionSchedule &schedule, const Model &base_model, const TrainConfig &cfg,
                            std::size_t trials);
RepeatedReport run_repeated(const SessionSchedule &schedule, const ModelConfig &model_cfg, const TrainConfig &cfg,
                            std::size_t trials);

// Fraction of test samples of old_classes predicted as one of new_classes.
double misassigned_fraction(const SessionMetrics &metrics, std::span<const int> old_classes,
                            std::span<const int> new_classes);

}  // namespace ipl

#endif  // IPL_PIPELINE_SESSIONS_HPP_
