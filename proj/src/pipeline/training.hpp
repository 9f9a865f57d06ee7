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

#ifndef IPL_PIPELINE_TRAINING_HPP_
#define IPL_PIPELINE_TRAINING_HPP_

#include <span>
#include <vector>

#include "data/dataset.hpp"
#include "episodes/episodes.hpp"
#include "model/model.hpp"
#include "numerics/graph.hpp"
#include "numerics/rng.hpp"
#include "pipeline/config.hpp"

namespace ipl {

std::size_t effective_batch_size(const TrainConfig &cfg, std::size_t dataset_size);

// Bank rows for each label; DataError for a label without a prototype.
std::vector<std::size_t> label_rows(const PrototypeBank &bank, std::span<const int> labels);

// Mini-batch SGD on cross_entropy(classify_cosine(extract_features(x)), y)
// for cfg.standard_epochs() epochs. Returns the mean loss of each epoch.
std::vector<double> train_base_standard(const Dataset &base, Model &model, const TrainConfig &cfg, Rng &rng);

// Episode objective: queries classified against the prototypes refined from
// the support class means and the surviving prototypes. With more than one
// update per episode the support classes are absorbed in sequential groups.
Var episode_loss(Graph &g, const Episode &episode, Model &model, const TrainConfig &cfg);

// One SGD step on episode_loss; returns the loss before the step.
double train_episode_step(const Episode &episode, Model &model, const TrainConfig &cfg);

// cfg.episodic_epochs() epochs of ceil(|base| / batch) iterations. Returns
// the loss of every iteration.
std::vector<double> train_incremental_representation(const Dataset &base, Model &model, const TrainConfig &cfg,
                                                     Rng &rng);

// Session 1: init from derive_seed(seed, "init"), then the standard phase and,
// if enabled, the episodic phase, both on the "train" stream.
Model train_base_session(const Dataset &base_train, const ModelConfig &model_cfg, const TrainConfig &cfg);

}  // namespace ipl

#endif  // IPL_PIPELINE_TRAINING_HPP_
