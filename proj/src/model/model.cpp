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

#include "model/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "numerics/error.hpp"

namespace ipl {

void ModelConfig::validate() const {
  if (input_dim == 0 || embed_dim == 0 || latent_dim == 0) throw ConfigError("model dimensions must be positive");
  for (auto h : hidden_dims) {
    if (h == 0) throw ConfigError("hidden layer widths must be positive");
  }
  if (!(scale_init > 0.0)) throw ConfigError("scale_init must be positive");
}

Var apply_linear(Graph &g, Linear &layer, Var x) {
  return add_row_vector(matmul(x, g.parameter(layer.weight)), g.parameter(layer.bias));
}

void BackboneParams::validate() const {
  if (layers.empty()) throw ConfigError("backbone has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto &l = layers[i];
    if (l.weight.rank() != 2 || l.bias.numel() != l.out_dim()) throw ShapeError("malformed backbone layer " + std::to_string(i));
    if (i + 1 < layers.size() && l.out_dim() != layers[i + 1].in_dim()) {
      throw ShapeError("backbone layer " + std::to_string(i) + " output does not chain into layer " + std::to_string(i + 1));
    }
  }
}

PrototypeBank::PrototypeBank(Tensor prototypes, std::vector<int> class_ids, Tensor scale)
    : prototypes_(std::move(prototypes)), class_ids_(std::move(class_ids)), scale_(std::move(scale)) {
  validate();
}

bool PrototypeBank::contains(int cls) const {
  return std::find(class_ids_.begin(), class_ids_.end(), cls) != class_ids_.end();
}

std::size_t PrototypeBank::row_of(int cls) const {
  auto it = std::find(class_ids_.begin(), class_ids_.end(), cls);
  if (it == class_ids_.end()) throw DataError("class " + std::to_string(cls) + " has no prototype");
  return static_cast<std::size_t>(it - class_ids_.begin());
}

void PrototypeBank::validate() const {
  if (prototypes_.rank() != 2) throw ShapeError("prototype matrix must be 2-d, got " + shape_str(prototypes_.shape()));
  if (prototypes_.dim(0) != class_ids_.size()) {
    throw ShapeError("prototype bank has " + std::to_string(prototypes_.dim(0)) + " rows for " +
                     std::to_string(class_ids_.size()) + " classes");
  }
  std::set<int> seen(class_ids_.begin(), class_ids_.end());
  if (seen.size() != class_ids_.size()) throw DataError("prototype bank has duplicate class ids");
  if (scale_.numel() != 1) throw ShapeError("scale must hold one value");
  if (!(scale_[0] > 0.0)) throw NumericError("scale factor must stay positive");
}

Tensor he_uniform(std::size_t fan_in, std::size_t fan_out, Rng &rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  Tensor w(Shape{fan_in, fan_out});
  for (auto &v : w.values()) v = rng.uniform(-bound, bound);
  return w;
}

Tensor init_prototypes(std::size_t count, std::size_t dim, Rng &rng) {
  Tensor cols = he_uniform(dim, count, rng);
  Tensor rows(Shape{count, dim});
  for (std::size_t c = 0; c < count; ++c)
    for (std::size_t j = 0; j < dim; ++j) rows.at(c, j) = cols.at(j, c);
  return rows;
}

namespace {

Linear make_linear(std::size_t in, std::size_t out, Rng &rng) {
  Linear l{he_uniform(in, out, rng), Tensor(Shape{out})};
  l.weight.set_requires_grad(true);
  l.bias.set_requires_grad(true);
  return l;
}

}  // namespace

Model init_params(const ModelConfig &cfg, std::span<const int> class_ids, Rng &rng) {
  cfg.validate();
  if (class_ids.empty()) throw ConfigError("model needs at least one base class");
  Model m;
  std::size_t in = cfg.input_dim;
  for (auto h : cfg.hidden_dims) {
    m.backbone.layers.push_back(make_linear(in, h, rng));
    in = h;
  }
  m.backbone.layers.push_back(make_linear(in, cfg.embed_dim, rng));

  Tensor rows = init_prototypes(class_ids.size(), cfg.embed_dim, rng);
  rows.set_requires_grad(true);
  Tensor scale = Tensor::vector({cfg.scale_init});
  scale.set_requires_grad(cfg.scale_learnable);
  m.bank = PrototypeBank(std::move(rows), std::vector<int>(class_ids.begin(), class_ids.end()), std::move(scale));

  m.heads.head_s = make_linear(cfg.embed_dim, cfg.latent_dim, rng);
  m.heads.head_p = make_linear(cfg.embed_dim, cfg.latent_dim, rng);
  return m;
}

Var extract_features(Graph &g, BackboneParams &backbone, Var batch) {
  if (batch.value().rank() != 2 || batch.value().dim(1) != backbone.input_dim()) {
    throw ShapeError("extract_features: batch " + shape_str(batch.shape()) + " for input dim " +
                     std::to_string(backbone.input_dim()));
  }
  Var h = batch;
  for (std::size_t i = 0; i < backbone.layers.size(); ++i) {
    h = apply_linear(g, backbone.layers[i], h);
    if (i + 1 < backbone.layers.size()) h = relu(h);
  }
  return h;
}

Tensor extract_features(const BackboneParams &backbone, const Tensor &batch) {
  // A frozen copy keeps the caller's tensors out of the tape.
  BackboneParams frozen = backbone;
  for (auto *p : backbone_parameters(frozen)) p->set_requires_grad(false);
  Graph g;
  return extract_features(g, frozen, g.constant(batch)).value();
}

Var cosine_logits(Var embeddings, Var prototypes, Var scale) {
  if (embeddings.value().rank() != 2 || prototypes.value().rank() != 2 ||
      embeddings.value().dim(1) != prototypes.value().dim(1)) {
    throw ShapeError("classify_cosine: embeddings " + shape_str(embeddings.shape()) + " vs prototypes " +
                     shape_str(prototypes.shape()));
  }
  Var cos = matmul(l2_normalize(embeddings), transpose(l2_normalize(prototypes)));
  return scale_by(cos, scale);
}

Var classify_cosine(Graph &g, Var embeddings, PrototypeBank &bank) {
  return cosine_logits(embeddings, g.parameter(bank.prototypes()), g.parameter(bank.scale()));
}

Tensor classify_cosine(const Tensor &embeddings, const PrototypeBank &bank) {
  Graph g;
  return cosine_logits(g.constant(embeddings), g.constant(bank.prototypes()), g.constant(bank.scale())).value();
}

std::vector<std::size_t> argmax_rows(const Tensor &logits) {
  std::vector<std::size_t> out(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (row[j] > row[best]) best = j;
    }
    out[r] = best;
  }
  return out;
}

std::vector<Tensor *> backbone_parameters(BackboneParams &backbone) {
  std::vector<Tensor *> out;
  for (auto &l : backbone.layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<Tensor *> head_parameters(ProjectionHeads &heads) {
  return {&heads.head_s.weight, &heads.head_s.bias, &heads.head_p.weight, &heads.head_p.bias};
}

}  // namespace ipl
