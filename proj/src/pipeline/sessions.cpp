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

#include "pipeline/sessions.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "episodes/episodes.hpp"
#include "numerics/error.hpp"
#include "numerics/optim.hpp"
#include "pipeline/training.hpp"
#include "sppr/sppr.hpp"

namespace ipl {

std::vector<double> MetricsReport::per_session_accuracy() const {
  std::vector<double> out;
  for (const auto &s : sessions) out.push_back(s.accuracy);
  return out;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

std::pair<Tensor, std::vector<int>> few_shot_means(const BackboneParams &backbone, const Dataset &few_shot) {
  if (few_shot.empty()) throw DataError("few-shot set is empty");
  const Tensor emb = extract_features(backbone, few_shot.features());
  const std::size_t d = emb.dim(1);
  std::vector<int> ids = few_shot.classes();
  Tensor means(Shape{ids.size(), d});
  for (std::size_t c = 0; c < ids.size(); ++c) {
    const auto &rows = few_shot.indices_of(ids[c]);
    Tensor block(Shape{1, rows.size(), d});
    for (std::size_t k = 0; k < rows.size(); ++k) std::copy_n(emb.row(rows[k]).begin(), d, block.data().begin() + k * d);
    const Tensor m = class_mean_embeddings(block);
    std::copy_n(m.data().begin(), d, means.row(c).begin());
  }
  return {std::move(means), std::move(ids)};
}

namespace {

void require_new_classes(const PrototypeBank &bank, const Dataset &few_shot) {
  if (few_shot.empty()) throw DataError("an increment must bring at least one new class");
  for (int c : few_shot.classes()) {
    if (bank.contains(c)) throw DataError("few-shot class " + std::to_string(c) + " overlaps an existing class");
  }
}

}  // namespace

Model absorb_session(const Model &model, const Dataset &few_shot, const TrainConfig &cfg) {
  require_new_classes(model.bank, few_shot);
  auto [means, ids] = few_shot_means(model.backbone, few_shot);
  Model out = model;
  out.bank = refine(model.bank, means, ids, model.heads, cfg.refinement);
  if (cfg.ft_enabled) out = finetune_baseline(out, few_shot, cfg);
  return out;
}

Model finetune_baseline(const Model &model, const Dataset &few_shot, const TrainConfig &cfg) {
  if (cfg.ft_steps == 0) throw ConfigError("ft_steps must be >= 1");
  if (few_shot.empty()) throw DataError("few-shot set is empty");
  Model out = model;
  // Classes without a prototype start at their class mean.
  auto [means, ids] = few_shot_means(model.backbone, few_shot);
  std::vector<std::size_t> missing;
  for (std::size_t c = 0; c < ids.size(); ++c) {
    if (!out.bank.contains(ids[c])) missing.push_back(c);
  }
  if (!missing.empty()) {
    const std::size_t d = out.bank.embed_dim();
    std::vector<double> data(out.bank.prototypes().values());
    std::vector<int> class_ids = out.bank.class_ids();
    for (auto c : missing) {
      data.insert(data.end(), means.row(c).begin(), means.row(c).end());
      class_ids.push_back(ids[c]);
    }
    Tensor protos(Shape{class_ids.size(), d}, std::move(data));
    protos.set_requires_grad(true);
    out.bank = PrototypeBank(std::move(protos), std::move(class_ids), out.bank.scale());
  }
  out.bank.prototypes().set_requires_grad(true);

  const auto targets = label_rows(out.bank, few_shot.labels());
  const Tensor frozen_emb = cfg.ft_backbone ? Tensor() : extract_features(out.backbone, few_shot.features());
  for (std::size_t step = 0; step < cfg.ft_steps; ++step) {
    Graph g;
    Var emb = cfg.ft_backbone ? extract_features(g, out.backbone, g.constant(few_shot.features())) : g.constant(frozen_emb);
    Var loss = cross_entropy(classify_cosine(g, emb, out.bank), targets);
    g.backward(loss);
    std::vector<Tensor *> params{&out.bank.prototypes()};
    if (out.bank.scale().requires_grad()) params.push_back(&out.bank.scale());
    if (cfg.ft_backbone) {
      for (auto *p : backbone_parameters(out.backbone)) params.push_back(p);
    }
    sgd_step(params, cfg.ft_lr, cfg.weight_decay);
  }
  out.bank.validate();
  return out;
}

PrototypeBank alt_update(const PrototypeBank &bank, const Tensor &new_means, std::span<const int> new_ids, AltMode mode,
                         Rng &rng) {
  if (new_ids.empty()) throw DataError("an increment must bring at least one new class");
  for (std::size_t i = 0; i < new_ids.size(); ++i) {
    if (bank.contains(new_ids[i])) throw DataError("new class " + std::to_string(new_ids[i]) + " already has a prototype");
    for (std::size_t j = 0; j < i; ++j) {
      if (new_ids[i] == new_ids[j]) throw DataError("duplicate new class id " + std::to_string(new_ids[i]));
    }
  }
  const std::size_t d = bank.embed_dim();
  if (new_means.rank() != 2 || new_means.dim(0) != new_ids.size() || new_means.dim(1) != d) {
    throw ShapeError("alt_update: means " + shape_str(new_means.shape()) + " for " + std::to_string(new_ids.size()) +
                     " classes of dim " + std::to_string(d));
  }
  Tensor fresh;
  switch (mode) {
    case AltMode::kZero: fresh = Tensor(Shape{new_ids.size(), d}); break;
    case AltMode::kRandom: fresh = init_prototypes(new_ids.size(), d, rng); break;
    case AltMode::kMean: fresh = Tensor(new_means.shape(), new_means.values()); break;
    case AltMode::kNone: throw ConfigError("alt_update called without a mode");
  }
  std::vector<double> data(bank.prototypes().values());
  data.insert(data.end(), fresh.values().begin(), fresh.values().end());
  std::vector<int> ids = bank.class_ids();
  ids.insert(ids.end(), new_ids.begin(), new_ids.end());
  Tensor protos(Shape{ids.size(), d}, std::move(data));
  protos.set_requires_grad(bank.prototypes().requires_grad());
  return PrototypeBank(std::move(protos), std::move(ids), bank.scale());
}

Model update_session(const Model &model, const Dataset &few_shot, const TrainConfig &cfg, Rng &rng) {
  require_new_classes(model.bank, few_shot);
  if (cfg.alt_mode != AltMode::kNone) {
    auto [means, ids] = few_shot_means(model.backbone, few_shot);
    Model out = model;
    out.bank = alt_update(model.bank, means, ids, cfg.alt_mode, rng);
    return out;
  }
  if (cfg.sppr_enabled) return absorb_session(model, few_shot, cfg);
  if (cfg.ft_enabled) return finetune_baseline(model, few_shot, cfg);
  throw ConfigError("no prototype update selected");
}

SessionMetrics evaluate(const Model &model, const Dataset &test, const std::vector<int> &class_order) {
  SessionMetrics m;
  m.classes = class_order;
  const std::size_t n = class_order.size();
  m.confusion.assign(n, std::vector<std::int64_t>(n, 0));
  if (test.empty()) throw DataError("empty test set");
  std::map<int, std::size_t> position;
  for (std::size_t i = 0; i < n; ++i) position[class_order[i]] = i;
  for (int id : model.bank.class_ids()) {
    if (!position.count(id)) throw StateError("prototype for class " + std::to_string(id) + " outside the session's classes");
  }
  const Tensor logits = classify_cosine(extract_features(model.backbone, test.features()), model.bank);
  const auto pred = argmax_rows(logits);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    auto t = position.find(test.labels()[i]);
    if (t == position.end()) throw DataError("test label " + std::to_string(test.labels()[i]) + " not in session classes");
    const int predicted = model.bank.class_ids()[pred[i]];
    m.confusion[t->second][position[predicted]] += 1;
    if (predicted == test.labels()[i]) ++correct;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  return m;
}

PrototypeSimilarity prototype_similarity(const PrototypeBank &before, const PrototypeBank &after) {
  PrototypeSimilarity s;
  const Tensor a = l2_normalize(before.prototypes());
  for (std::size_t r = 0; r < before.num_classes(); ++r) {
    const int id = before.class_ids()[r];
    if (!after.contains(id)) continue;
    Tensor row(Shape{1, after.embed_dim()});
    std::copy_n(after.prototype(id).begin(), after.embed_dim(), row.data().begin());
    const Tensor b = l2_normalize(row);
    double dot = 0.0;
    for (std::size_t j = 0; j < b.numel(); ++j) dot += a.row(r)[j] * b[j];
    s.class_ids.push_back(id);
    s.cosine.push_back(dot);
  }
  s.mean = mean_of(s.cosine);
  return s;
}

MetricsReport run_increments(const SessionSchedule &schedule, const Model &base_model, const TrainConfig &cfg,
                             std::uint64_t trial_seed) {
  cfg.validate();
  schedule.validate();
  MetricsReport report;
  report.seed = trial_seed;
  Rng rng(trial_seed);
  Model model = base_model;
  report.sessions.push_back(evaluate(model, schedule.base_test, schedule.base_classes));
  report.sessions.back().session = 1;
  for (std::size_t s = 2; s <= schedule.session_count(); ++s) {
    Model next = update_session(model, schedule.increments[s - 2].train, cfg, rng);
    PrototypeSimilarity sim = prototype_similarity(model.bank, next.bank);
    sim.session = s;
    report.similarity.push_back(std::move(sim));
    model = std::move(next);
    report.sessions.push_back(evaluate(model, schedule.cumulative_test(s), schedule.classes_through(s)));
    report.sessions.back().session = s;
  }
  const auto acc = report.per_session_accuracy();
  report.average_accuracy = mean_of(acc);
  return report;
}

MetricsReport run_sessions(const SessionSchedule &schedule, const ModelConfig &model_cfg, const TrainConfig &cfg) {
  const Model base = train_base_session(schedule.base_train, model_cfg, cfg);
  return run_increments(schedule, base, cfg, derive_seed(cfg.seed, "trial", 0));
}

RepeatedReport run_repeated(const SessionSchedule &schedule, const Model &base_model, const TrainConfig &cfg,
                            std::size_t trials) {
  if (trials == 0) throw ConfigError("trials must be >= 1");
  RepeatedReport out;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t seed = derive_seed(cfg.seed, "trial", t);
    out.seeds.push_back(seed);
    if (t == 0) {
      out.trials.push_back(run_increments(schedule, base_model, cfg, seed));
    } else {
      Rng shot_rng(seed);
      out.trials.push_back(run_increments(resample_shots(schedule, shot_rng), base_model, cfg, seed));
    }
  }
  const std::size_t sessions = schedule.session_count();
  for (std::size_t s = 0; s < sessions; ++s) {
    std::vector<double> acc;
    for (const auto &r : out.trials) acc.push_back(r.sessions[s].accuracy);
    const double m = mean_of(acc);
    double var = 0.0;
    for (double a : acc) var += (a - m) * (a - m);
    out.mean_accuracy.push_back(m);
    out.stddev_accuracy.push_back(std::sqrt(var / static_cast<double>(acc.size())));
  }
  out.average_accuracy = mean_of(out.mean_accuracy);
  std::vector<double> averages;
  for (const auto &r : out.trials) averages.push_back(r.average_accuracy);
  const double m = mean_of(averages);
  double var = 0.0;
  for (double a : averages) var += (a - m) * (a - m);
  out.average_stddev = std::sqrt(var / static_cast<double>(averages.size()));
  return out;
}

RepeatedReport run_repeated(const SessionSchedule &schedule, const ModelConfig &model_cfg, const TrainConfig &cfg,
                            std::size_t trials) {
  const Model base = train_base_session(schedule.base_train, model_cfg, cfg);
  return run_repeated(schedule, base, cfg, trials);
}

double misassigned_fraction(const SessionMetrics &metrics, std::span<const int> old_classes,
                            std::span<const int> new_classes) {
  auto pos = [&](int id) {
    auto it = std::find(metrics.classes.begin(), metrics.classes.end(), id);
    if (it == metrics.classes.end()) throw DataError("class " + std::to_string(id) + " not in confusion matrix");
    return static_cast<std::size_t>(it - metrics.classes.begin());
  };
  std::int64_t total = 0, moved = 0;
  for (int o : old_classes) {
    const auto &row = metrics.confusion[pos(o)];
    for (auto v : row) total += v;
    for (int n : new_classes) moved += row[pos(n)];
  }
  return total == 0 ? 0.0 : static_cast<double>(moved) / static_cast<double>(total);
}

}  // namespace ipl
