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

#ifndef IPL_SPPR_SPPR_HPP_
#define IPL_SPPR_SPPR_HPP_

#include <span>
#include <string>
#include <vector>

#include "model/model.hpp"
#include "numerics/graph.hpp"

namespace ipl {

enum class RefinementMode { kRaw, kSoftmax };

const char *refinement_mode_name(RefinementMode mode);
RefinementMode parse_refinement_mode(const std::string &name);

struct RefinementConfig {
  RefinementMode mode = RefinementMode::kSoftmax;
  // Softmax mode only; weights are softmax(corr / temperature) per output row.
  double temperature = 1.0 / 16.0;
  bool use_projection_heads = true;

  void validate() const;
};

// Relation matrix between surviving prototypes (rows) and the concatenation
// [new classes..., surviving classes...] (columns). Entries are cosines.
struct RelationMatrix {
  Tensor values;
  std::vector<int> new_ids;
  std::vector<int> old_ids;
};

struct Latents {
  Var t_s;
  Var t_p;
};

// T_s = relu(r_s W_s + b_s), T_p = relu(protos W_p + b_p); identity when
// use_heads is false.
Latents project_to_latent(Graph &g, Var r_s, Var protos, ProjectionHeads &heads, bool use_heads);

// normalize rows, stack [t_s; t_p], corr = t_p_hat * stacked_hat^T.
Var relation_matrix(Var t_s, Var t_p);

// raw:     refined = corr^T * protos_old
// softmax: refined = softmax_rows(corr^T, temperature) * protos_old
// Output rows follow the corr columns: [new..., old...].
Var refine_prototypes(Var corr, Var protos_old, const RefinementConfig &cfg);

// project -> relation -> refine, on the caller's graph.
Var refine_on_graph(Graph &g, Var r_s, Var protos_old, ProjectionHeads &heads, const RefinementConfig &cfg);

// Tape-free versions.
Latents project_to_latent(Graph &g, const Tensor &r_s, const Tensor &protos, const ProjectionHeads &heads,
                          bool use_heads);
RelationMatrix relation_matrix(const Tensor &t_s, const Tensor &t_p, std::vector<int> new_ids, std::vector<int> old_ids);
Tensor refine_prototypes(const RelationMatrix &corr, const Tensor &protos_old, const RefinementConfig &cfg);

// New bank over [new_ids..., old ids...] with refined prototypes and the same
// scale. The input bank is not modified.
PrototypeBank refine(const PrototypeBank &bank, const Tensor &new_embeddings, std::span<const int> new_ids,
                     const ProjectionHeads &heads, const RefinementConfig &cfg);

}  // namespace ipl

#endif  // IPL_SPPR_SPPR_HPP_
