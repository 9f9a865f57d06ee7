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

#include "episodes/episodes.hpp"

#include <algorithm>
#include <set>

#include "numerics/error.hpp"

namespace ipl {

void EpisodeConfig::validate() const {
  if (n_way == 0 || k_shot == 0 || query_batch == 0 || updates_per_episode == 0) {
    throw ConfigError("episode n_way, k_shot, query_batch and updates_per_episode must all be >= 1");
  }
  if (n_way % updates_per_episode != 0) {
    throw ConfigError("n_way (" + std::to_string(n_way) + ") must be divisible by updates_per_episode (" +
                      std::to_string(updates_per_episode) + ")");
  }
}

Episode sample_episode(const Dataset &base, const EpisodeConfig &cfg, Rng &rng) {
  cfg.validate();
  const std::vector<int> classes = base.classes();
  if (classes.size() < cfg.n_way) {
    throw DataError("episode needs " + std::to_string(cfg.n_way) + " classes, base set has " + std::to_string(classes.size()));
  }
  Episode ep;
  ep.k_shot = cfg.k_shot;
  std::vector<std::size_t> support_rows;
  for (auto pick : rng.sample_without_replacement(classes.size(), cfg.n_way)) ep.support_ids.push_back(classes[pick]);
  for (int c : ep.support_ids) {
    const auto &idx = base.indices_of(c);
    if (idx.size() < cfg.k_shot) {
      throw DataError("class " + std::to_string(c) + " has " + std::to_string(idx.size()) + " samples, episode needs " +
                      std::to_string(cfg.k_shot));
    }
    for (auto pick : rng.sample_without_replacement(idx.size(), cfg.k_shot)) support_rows.push_back(idx[pick]);
  }
  ep.support = base.gather(support_rows);
  ep.eliminated_ids = ep.support_ids;

  std::vector<bool> in_support(base.size(), false);
  for (auto r : support_rows) in_support[r] = true;
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (!in_support[i]) pool.push_back(i);
  }
  if (pool.empty()) throw DataError("no query samples left after drawing the support set");
  std::vector<std::size_t> query_rows;
  for (auto pick : rng.sample_without_replacement(pool.size(), std::min(cfg.query_batch, pool.size()))) {
    query_rows.push_back(pool[pick]);
  }
  ep.query = base.gather(query_rows);
  for (auto r : query_rows) ep.query_labels.push_back(base.labels()[r]);
  return ep;
}

Var class_mean_embeddings(Var support_embeddings) { return mean_over_shots(support_embeddings); }

Tensor class_mean_embeddings(const Tensor &support_embeddings) {
  Graph g;
  return mean_over_shots(g.constant(support_embeddings)).value();
}

std::vector<std::size_t> surviving_rows(const PrototypeBank &bank, std::span<const int> ids) {
  std::set<int> drop(ids.begin(), ids.end());
  if (drop.size() != ids.size()) throw DataError("duplicate class id in elimination set");
  for (int id : drop) {
    if (!bank.contains(id)) throw DataError("cannot eliminate unknown class " + std::to_string(id));
  }
  if (drop.size() >= bank.num_classes()) throw DataError("elimination would remove every prototype");
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < bank.num_classes(); ++r) {
    if (!drop.count(bank.class_ids()[r])) rows.push_back(r);
  }
  return rows;
}

PrototypeBank eliminate_prototypes(const PrototypeBank &bank, std::span<const int> ids) {
  auto rows = surviving_rows(bank, ids);
  const std::size_t d = bank.embed_dim();
  Tensor protos(Shape{rows.size(), d});
  std::vector<int> kept;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(bank.prototypes().row(rows[i]).begin(), d, protos.row(i).begin());
    kept.push_back(bank.class_ids()[rows[i]]);
  }
  protos.set_requires_grad(bank.prototypes().requires_grad());
  return PrototypeBank(std::move(protos), std::move(kept), bank.scale());
}

}  // namespace ipl
