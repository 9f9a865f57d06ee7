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

#include "pipeline/training.hpp"

#include <algorithm>
#include <numeric>

#include "numerics/error.hpp"
#include "numerics/optim.hpp"
#include "sppr/sppr.hpp"

namespace ipl {

std::size_t effective_batch_size(const TrainConfig &cfg, std::size_t dataset_size) {
  return std::max<std::size_t>(1, std::min(cfg.batch_size, dataset_size));
}

std::vector<std::size_t> label_rows(const PrototypeBank &bank, std::span<const int> labels) {
  std::vector<std::size_t> rows;
  rows.reserve(labels.size());
  for (int l : labels) rows.push_back(bank.row_of(l));
  return rows;
}

namespace {

std::vector<Tensor *> trainable(Model &model, bool with_heads) {
  auto params = backbone_parameters(model.backbone);
  params.push_back(&model.bank.prototypes());
  if (model.bank.scale().requires_grad()) params.push_back(&model.bank.scale());
  if (with_heads) {
    for (auto *p : head_parameters(model.heads)) params.push_back(p);
  }
  return params;
}

double standard_batch_step(const Dataset &base, std::span<const std::size_t> rows, Model &model, const TrainConfig &cfg) {
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (auto r : rows) labels.push_back(base.labels()[r]);
  Graph g;
  Var emb = extract_features(g, model.backbone, g.constant(base.gather(rows)));
  Var loss = cross_entropy(classify_cosine(g, emb, model.bank), label_rows(model.bank, labels));
  g.backward(loss);
  auto params = trainable(model, false);
  sgd_step(params, cfg.lr, cfg.weight_decay);
  return loss.value().item();
}

}  // namespace

std::vector<double> train_base_standard(const Dataset &base, Model &model, const TrainConfig &cfg, Rng &rng) {
  cfg.validate();
  if (base.empty()) throw DataError("base training set is empty");
  label_rows(model.bank, base.labels());
  const std::size_t batch = effective_batch_size(cfg, base.size());
  std::vector<std::size_t> order(base.size());
  std::vector<double> epoch_loss;
  for (std::size_t e = 0; e < cfg.standard_epochs(); ++e) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      total += standard_batch_step(base, std::span<const std::size_t>(order).subspan(start, end - start), model, cfg);
      ++batches;
    }
    epoch_loss.push_back(total / static_cast<double>(batches));
  }
  return epoch_loss;
}

Var episode_loss(Graph &g, const Episode &episode, Model &model, const TrainConfig &cfg) {
  const std::size_t n_way = episode.support_ids.size();
  const std::size_t updates = cfg.episode.updates_per_episode;
  if (n_way == 0 || n_way % updates != 0) {
    throw ConfigError("episode of " + std::to_string(n_way) + " classes cannot be split into " + std::to_string(updates) +
                      " updates");
  }
  Var query = extract_features(g, model.backbone, g.constant(episode.query));
  Var support = extract_features(g, model.backbone, g.constant(episode.support));
  const std::size_t d = support.value().dim(1);
  Var r_s = class_mean_embeddings(reshape(support, Shape{n_way, episode.k_shot, d}));

  auto survivors = surviving_rows(model.bank, episode.eliminated_ids);
  Var protos = gather_rows(g.parameter(model.bank.prototypes()), survivors);
  std::vector<int> order;
  for (auto r : survivors) order.push_back(model.bank.class_ids()[r]);

  const std::size_t group = n_way / updates;
  for (std::size_t u = 0; u < updates; ++u) {
    std::vector<std::size_t> rows(group);
    std::iota(rows.begin(), rows.end(), u * group);
    protos = refine_on_graph(g, gather_rows(r_s, rows), protos, model.heads, cfg.refinement);
    order.insert(order.begin(), episode.support_ids.begin() + static_cast<std::ptrdiff_t>(u * group),
                 episode.support_ids.begin() + static_cast<std::ptrdiff_t>((u + 1) * group));
  }

  std::vector<std::size_t> targets;
  targets.reserve(episode.query_labels.size());
  for (int label : episode.query_labels) {
    auto it = std::find(order.begin(), order.end(), label);
    if (it == order.end()) throw DataError("query label " + std::to_string(label) + " has no prototype");
    targets.push_back(static_cast<std::size_t>(it - order.begin()));
  }
  Var logits = cosine_logits(query, protos, g.parameter(model.bank.scale()));
  return cross_entropy(logits, std::move(targets));
}

double train_episode_step(const Episode &episode, Model &model, const TrainConfig &cfg) {
  Graph g;
  Var loss = episode_loss(g, episode, model, cfg);
  g.backward(loss);
  auto params = trainable(model, cfg.refinement.use_projection_heads);
  sgd_step(params, cfg.lr, cfg.weight_decay);
  return loss.value().item();
}

std::vector<double> train_incremental_representation(const Dataset &base, Model &model, const TrainConfig &cfg,
                                                     Rng &rng) {
  cfg.validate();
  if (!cfg.episodic_enabled) throw ConfigError("episodic training is disabled in this configuration");
  const std::size_t batch = effective_batch_size(cfg, base.size());
  const std::size_t iterations = (base.size() + batch - 1) / batch;
  std::vector<double> losses;
  for (std::size_t e = 0; e < cfg.episodic_epochs(); ++e) {
    for (std::size_t it = 0; it < iterations; ++it) {
      if (cfg.episodic_mix < 1.0 && rng.uniform() >= cfg.episodic_mix) {
        auto rows = rng.sample_without_replacement(base.size(), batch);
        losses.push_back(standard_batch_step(base, rows, model, cfg));
        continue;
      }
      Episode ep = sample_episode(base, cfg.episode, rng);
      losses.push_back(train_episode_step(ep, model, cfg));
    }
  }
  return losses;
}

Model train_base_session(const Dataset &base_train, const ModelConfig &model_cfg, const TrainConfig &cfg) {
  cfg.validate();
  Rng init_rng(derive_seed(cfg.seed, "init"));
  const auto classes = base_train.classes();
  Model model = init_params(model_cfg, classes, init_rng);
  Rng train_rng(derive_seed(cfg.seed, "train"));
  train_base_standard(base_train, model, cfg, train_rng);
  if (cfg.episodic_enabled && cfg.episodic_epochs() > 0) train_incremental_representation(base_train, model, cfg, train_rng);
  return model;
}

}  // namespace ipl
