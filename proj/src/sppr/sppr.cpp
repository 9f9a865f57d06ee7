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

#include "sppr/sppr.hpp"

#include <set>

#include "numerics/error.hpp"

namespace ipl {

const char *refinement_mode_name(RefinementMode mode) {
  return mode == RefinementMode::kRaw ? "raw" : "softmax";
}

RefinementMode parse_refinement_mode(const std::string &name) {
  if (name == "raw") return RefinementMode::kRaw;
  if (name == "softmax") return RefinementMode::kSoftmax;
  throw ConfigError("unknown refinement mode '" + name + "' (expected raw or softmax)");
}

void RefinementConfig::validate() const {
  if (mode == RefinementMode::kSoftmax && !(temperature > 0.0)) {
    throw ConfigError("refinement temperature must be positive in softmax mode");
  }
}

Latents project_to_latent(Graph &g, Var r_s, Var protos, ProjectionHeads &heads, bool use_heads) {
  if (r_s.value().rank() != 2 || protos.value().rank() != 2 || r_s.value().dim(1) != protos.value().dim(1)) {
    throw ShapeError("project_to_latent: embeddings " + shape_str(r_s.shape()) + " vs prototypes " +
                     shape_str(protos.shape()));
  }
  if (!use_heads) return {r_s, protos};
  if (r_s.value().dim(1) != heads.head_s.in_dim() || protos.value().dim(1) != heads.head_p.in_dim()) {
    throw ShapeError("project_to_latent: input dim " + std::to_string(r_s.value().dim(1)) + " vs head dim " +
                     std::to_string(heads.head_s.in_dim()));
  }
  return {relu(apply_linear(g, heads.head_s, r_s)), relu(apply_linear(g, heads.head_p, protos))};
}

Var relation_matrix(Var t_s, Var t_p) {
  Var p_hat = l2_normalize(t_p);
  Var all_hat = concat_rows(l2_normalize(t_s), p_hat);
  return matmul(p_hat, transpose(all_hat));
}

Var refine_prototypes(Var corr, Var protos_old, const RefinementConfig &cfg) {
  cfg.validate();
  if (protos_old.value().rank() != 2 || protos_old.value().dim(0) == 0) {
    throw DataError("refinement needs at least one surviving prototype");
  }
  if (corr.value().rank() != 2 || corr.value().dim(0) != protos_old.value().dim(0)) {
    throw ShapeError("refine_prototypes: relation matrix " + shape_str(corr.shape()) + " for " +
                     std::to_string(protos_old.value().dim(0)) + " prototypes");
  }
  Var weights = transpose(corr);
  if (cfg.mode == RefinementMode::kSoftmax) weights = softmax(weights, cfg.temperature);
  return matmul(weights, protos_old);
}

Var refine_on_graph(Graph &g, Var r_s, Var protos_old, ProjectionHeads &heads, const RefinementConfig &cfg) {
  auto [t_s, t_p] = project_to_latent(g, r_s, protos_old, heads, cfg.use_projection_heads);
  return refine_prototypes(relation_matrix(t_s, t_p), protos_old, cfg);
}

Latents project_to_latent(Graph &g, const Tensor &r_s, const Tensor &protos, const ProjectionHeads &heads,
                          bool use_heads) {
  if (r_s.rank() != 2 || protos.rank() != 2 || r_s.dim(1) != protos.dim(1)) {
    throw ShapeError("project_to_latent: embeddings " + shape_str(r_s.shape()) + " vs prototypes " +
                     shape_str(protos.shape()));
  }
  Var s = g.constant(r_s), p = g.constant(protos);
  if (!use_heads) return {s, p};
  if (r_s.dim(1) != heads.head_s.in_dim() || protos.dim(1) != heads.head_p.in_dim()) {
    throw ShapeError("project_to_latent: input dim " + std::to_string(r_s.dim(1)) + " vs head dim " +
                     std::to_string(heads.head_s.in_dim()));
  }
  auto head = [&g](const Linear &l, Var x) {
    return relu(add_row_vector(matmul(x, g.constant(l.weight)), g.constant(l.bias)));
  };
  return {head(heads.head_s, s), head(heads.head_p, p)};
}

RelationMatrix relation_matrix(const Tensor &t_s, const Tensor &t_p, std::vector<int> new_ids, std::vector<int> old_ids) {
  if (t_s.rank() != 2 || t_p.rank() != 2 || t_s.dim(1) != t_p.dim(1)) {
    throw ShapeError("relation_matrix: latent widths differ " + shape_str(t_s.shape()) + " vs " + shape_str(t_p.shape()));
  }
  if (new_ids.size() != t_s.dim(0) || old_ids.size() != t_p.dim(0)) throw ShapeError("relation_matrix: id count mismatch");
  Graph g;
  return {relation_matrix(g.constant(t_s), g.constant(t_p)).value(), std::move(new_ids), std::move(old_ids)};
}

Tensor refine_prototypes(const RelationMatrix &corr, const Tensor &protos_old, const RefinementConfig &cfg) {
  Graph g;
  return refine_prototypes(g.constant(corr.values), g.constant(protos_old), cfg).value();
}

PrototypeBank refine(const PrototypeBank &bank, const Tensor &new_embeddings, std::span<const int> new_ids,
                     const ProjectionHeads &heads, const RefinementConfig &cfg) {
  if (new_ids.empty()) throw DataError("refinement needs at least one new class");
  std::set<int> fresh(new_ids.begin(), new_ids.end());
  if (fresh.size() != new_ids.size()) throw DataError("duplicate new class id");
  for (int id : new_ids) {
    if (bank.contains(id)) throw DataError("new class " + std::to_string(id) + " already has a prototype");
  }
  if (new_embeddings.rank() != 2 || new_embeddings.dim(0) != new_ids.size()) {
    throw ShapeError("refine: " + std::to_string(new_ids.size()) + " new ids for embeddings " +
                     shape_str(new_embeddings.shape()));
  }
  Graph g;
  auto [t_s, t_p] = project_to_latent(g, new_embeddings, bank.prototypes(), heads, cfg.use_projection_heads);
  Var refined = refine_prototypes(relation_matrix(t_s, t_p), g.constant(bank.prototypes()), cfg);

  std::vector<int> ids(new_ids.begin(), new_ids.end());
  ids.insert(ids.end(), bank.class_ids().begin(), bank.class_ids().end());
  Tensor protos = refined.value();
  protos.set_requires_grad(bank.prototypes().requires_grad());
  Tensor scale(bank.scale().shape(), bank.scale().values());
  scale.set_requires_grad(bank.scale().requires_grad());
  return PrototypeBank(std::move(protos), std::move(ids), std::move(scale));
}

}  // namespace ipl
