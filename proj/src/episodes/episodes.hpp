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

#ifndef IPL_EPISODES_EPISODES_HPP_
#define IPL_EPISODES_EPISODES_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "data/dataset.hpp"
#include "model/model.hpp"
#include "numerics/graph.hpp"
#include "numerics/rng.hpp"

namespace ipl {

struct EpisodeConfig {
  std::size_t n_way = 5;
  std::size_t k_shot = 5;
  // Capped at the number of non-support samples.
  std::size_t query_batch = 128;
  std::size_t updates_per_episode = 1;

  void validate() const;
};

// One simulated increment drawn from the base set.
struct Episode {
  std::vector<int> support_ids;   // N distinct classes, in draw order
  Tensor support;                 // [N*K x dim], class-major
  std::size_t k_shot = 0;
  Tensor query;                   // [Q x dim]
  std::vector<int> query_labels;  // any base class
  std::vector<int> eliminated_ids;
};

// Classes uniformly without replacement, then K shots per class uniformly
// without replacement, then queries uniformly without replacement from every
// base sample that is not in the support set.
Episode sample_episode(const Dataset &base, const EpisodeConfig &cfg, Rng &rng);

// [N x K x d] -> [N x d]
Var class_mean_embeddings(Var support_embeddings);
Tensor class_mean_embeddings(const Tensor &support_embeddings);

// Rows of bank whose class is not in ids, in bank order.
std::vector<std::size_t> surviving_rows(const PrototypeBank &bank, std::span<const int> ids);
PrototypeBank eliminate_prototypes(const PrototypeBank &bank, std::span<const int> ids);

}  // namespace ipl

#endif  // IPL_EPISODES_EPISODES_HPP_
