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

#ifndef IPL_MODEL_MODEL_HPP_
#define IPL_MODEL_MODEL_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "numerics/graph.hpp"
#include "numerics/rng.hpp"
#include "numerics/tensor.hpp"

namespace ipl {

struct ModelConfig {
  std::size_t input_dim = 32;
  std::vector<std::size_t> hidden_dims{64, 64};
  std::size_t embed_dim = 32;
  std::size_t latent_dim = 32;
  double scale_init = 10.0;
  bool scale_learnable = true;

  void validate() const;
};

// Affine map y = x W + b with W [in x out], b [out].
struct Linear {
  Tensor weight;
  Tensor bias;

  std::size_t in_dim() const { return weight.dim(0); }
  std::size_t out_dim() const { return weight.dim(1); }
};

Var apply_linear(Graph &g, Linear &layer, Var x);

// linear -> relu -> ... -> linear (no relu after the last layer).
struct BackboneParams {
  std::vector<Linear> layers;

  std::size_t input_dim() const { return layers.front().in_dim(); }
  std::size_t embed_dim() const { return layers.back().out_dim(); }
  void validate() const;
};

class PrototypeBank {
 public:
  PrototypeBank() = default;
  PrototypeBank(Tensor prototypes, std::vector<int> class_ids, Tensor scale);

  const Tensor &prototypes() const { return prototypes_; }
  Tensor &prototypes() { return prototypes_; }
  const Tensor &scale() const { return scale_; }
  Tensor &scale() { return scale_; }
  double scale_value() const { return scale_[0]; }
  const std::vector<int> &class_ids() const { return class_ids_; }

  std::size_t num_classes() const { return class_ids_.size(); }
  std::size_t embed_dim() const { return prototypes_.dim(1); }
  bool contains(int cls) const;
  // Row of cls; DataError when absent.
  std::size_t row_of(int cls) const;
  std::span<const double> prototype(int cls) const { return prototypes_.row(row_of(cls)); }

  // Throws unless ids are distinct, rows match ids and the scale is positive.
  void validate() const;

 private:
  Tensor prototypes_;
  std::vector<int> class_ids_;
  Tensor scale_;
};

struct ProjectionHeads {
  Linear head_s;  // new-class embeddings -> latent
  Linear head_p;  // prototypes -> latent

  std::size_t latent_dim() const { return head_s.out_dim(); }
};

struct Model {
  BackboneParams backbone;
  PrototypeBank bank;
  ProjectionHeads heads;
};

// Weights: uniform in +-sqrt(6 / fan_in) (He-uniform), biases zero.
// Prototypes use the same draw with fan_in = embed_dim. Tensors are drawn
// in order: backbone layers, prototypes, head_s, head_p.
Model init_params(const ModelConfig &cfg, std::span<const int> class_ids, Rng &rng);

Tensor he_uniform(std::size_t fan_in, std::size_t fan_out, Rng &rng);
// [count x dim] rows drawn like a weight matrix with fan_in = dim.
Tensor init_prototypes(std::size_t count, std::size_t dim, Rng &rng);

Var extract_features(Graph &g, BackboneParams &backbone, Var batch);
Tensor extract_features(const BackboneParams &backbone, const Tensor &batch);

// logit[i][j] = scale * <normalize(prototype_j), normalize(embedding_i)>.
Var cosine_logits(Var embeddings, Var prototypes, Var scale);
Var classify_cosine(Graph &g, Var embeddings, PrototypeBank &bank);
Tensor classify_cosine(const Tensor &embeddings, const PrototypeBank &bank);

// Row-wise argmax; the lowest index wins ties.
std::vector<std::size_t> argmax_rows(const Tensor &logits);

// Every trainable tensor of the model, in a fixed order.
std::vector<Tensor *> backbone_parameters(BackboneParams &backbone);
std::vector<Tensor *> head_parameters(ProjectionHeads &heads);

}  // namespace ipl

#endif  // IPL_MODEL_MODEL_HPP_
