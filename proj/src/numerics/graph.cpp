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

#include "numerics/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "numerics/error.hpp"

namespace ipl {

// ---- Var / Graph ---------------------------------------------------------

const Tensor &Var::value() const {
  if (!graph_) throw StateError("use of an unbound Var");
  return graph_->value(id_);
}

std::span<const double> Var::grad() const {
  if (!graph_) throw StateError("use of an unbound Var");
  return graph_->grad(id_);
}

Var Graph::constant(Tensor value) {
  if (!value.all_finite()) throw NumericError("non-finite value in constant " + shape_str(value.shape()));
  Node node;
  value.clear_grad();
  value.set_requires_grad(false);
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Graph::parameter(Tensor &tensor) {
  if (auto it = bound_ids_.find(&tensor); it != bound_ids_.end()) return Var(this, it->second);
  if (!tensor.all_finite()) throw NumericError("non-finite parameter " + shape_str(tensor.shape()));
  Node node;
  node.value = Tensor(tensor.shape(), tensor.values());
  node.bound = &tensor;
  node.needs_grad = tensor.requires_grad();
  nodes_.push_back(std::move(node));
  bound_ids_[&tensor] = nodes_.size() - 1;
  return Var(this, nodes_.size() - 1);
}

Var Graph::record(std::vector<Var> inputs, ForwardFn forward, BackwardFn backward) {
  Node node;
  std::vector<const Tensor *> in;
  in.reserve(inputs.size());
  for (const auto &v : inputs) {
    if (v.graph_ != this) throw StateError("operation mixes nodes from different graphs");
    node.inputs.push_back(v.id_);
    node.needs_grad = node.needs_grad || nodes_[v.id_].needs_grad;
    in.push_back(&nodes_[v.id_].value);
  }
  node.value = forward(in);
  if (!node.value.all_finite()) throw NumericError("operation produced non-finite values " + shape_str(node.value.shape()));
  node.forward = std::move(forward);
  if (node.needs_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

void Graph::backward(Var loss) {
  if (loss.graph_ != this) throw StateError("loss belongs to another graph");
  if (nodes_[loss.id_].value.numel() != 1) {
    throw ShapeError("backward needs a scalar loss, got " + shape_str(nodes_[loss.id_].value.shape()));
  }
  for (auto &node : nodes_) {
    if (node.needs_grad) {
      node.grad.assign(node.value.numel(), 0.0);
    } else {
      node.grad.clear();
    }
  }
  if (!nodes_[loss.id_].needs_grad) return;
  nodes_[loss.id_].grad[0] = 1.0;

  std::vector<const Tensor *> in;
  std::vector<std::vector<double> *> in_grads;
  for (std::size_t i = loss.id_ + 1; i-- > 0;) {
    Node &node = nodes_[i];
    if (!node.needs_grad || !node.backward) continue;
    in.clear();
    in_grads.clear();
    for (auto id : node.inputs) {
      in.push_back(&nodes_[id].value);
      in_grads.push_back(nodes_[id].needs_grad ? &nodes_[id].grad : nullptr);
    }
    node.backward(in, node.value, node.grad, in_grads);
  }
  for (auto &node : nodes_) {
    if (node.bound && node.needs_grad) node.bound->accumulate_grad(node.grad);
  }
}

void Graph::replay() {
  min_relu_margin_ = std::numeric_limits<double>::infinity();
  std::vector<const Tensor *> in;
  for (auto &node : nodes_) {
    if (node.bound) {
      node.value = Tensor(node.bound->shape(), node.bound->values());
      continue;
    }
    if (!node.forward) continue;
    in.clear();
    for (auto id : node.inputs) in.push_back(&nodes_[id].value);
    node.value = node.forward(in);
  }
}

void Graph::note_relu_margin(double margin) { min_relu_margin_ = std::min(min_relu_margin_, margin); }

// ---- value kernels -------------------------------------------------------

namespace {

void require_rank2(const Tensor &t, const char *op) {
  if (t.rank() != 2) throw ShapeError(std::string(op) + " expects a matrix, got " + shape_str(t.shape()));
}

void require_same_shape(const Tensor &a, const Tensor &b, const char *op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

// C += A * B with A [m x k], B [k x n].
void gemm_acc(const double *a, const double *b, double *c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double *brow = b + p * n;
      double *crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void add_into(std::vector<double> *dst, std::span<const double> src) {
  if (!dst) return;
  for (std::size_t i = 0; i < src.size(); ++i) (*dst)[i] += src[i];
}

}  // namespace

double sorted_sum(std::vector<double> &values) {
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

Tensor matmul(const Tensor &a, const Tensor &b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  if (a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul: inner dimensions differ " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  }
  Tensor c(Shape{a.dim(0), b.dim(1)});
  gemm_acc(a.data().data(), b.data().data(), c.data().data(), a.dim(0), a.dim(1), b.dim(1));
  return c;
}

Tensor softmax(const Tensor &logits, double temperature) {
  if (!(temperature > 0.0)) throw ParameterError("softmax temperature must be positive");
  if (logits.rank() == 0 || logits.cols() == 0) throw ShapeError("softmax over an empty axis");
  Tensor out(logits.shape());
  const std::size_t k = logits.cols();
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto in = logits.row(r);
    auto o = out.row(r);
    double m = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      o[j] = std::exp((in[j] - m) / temperature);
      z += o[j];
    }
    for (std::size_t j = 0; j < k; ++j) o[j] /= z;
  }
  return out;
}

Tensor l2_normalize(const Tensor &x, double epsilon) {
  if (x.rank() == 0 || x.cols() == 0) throw ShapeError("l2_normalize over an empty axis");
  Tensor out(x.shape());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto in = x.row(r);
    double sq = 0.0;
    for (double v : in) sq += v * v;
    const double denom = std::max(std::sqrt(sq), epsilon);
    auto o = out.row(r);
    for (std::size_t j = 0; j < in.size(); ++j) o[j] = in[j] / denom;
  }
  return out;
}

double cross_entropy(const Tensor &logits, std::span<const std::size_t> targets) {
  require_rank2(logits, "cross_entropy");
  const std::size_t b = logits.dim(0), k = logits.dim(1);
  if (targets.size() != b) throw ShapeError("cross_entropy: " + std::to_string(targets.size()) + " targets for batch " + std::to_string(b));
  if (b == 0 || k == 0) throw ShapeError("cross_entropy on an empty batch");
  double total = 0.0;
  for (std::size_t r = 0; r < b; ++r) {
    if (targets[r] >= k) {
      throw IndexError("cross_entropy: target " + std::to_string(targets[r]) + " outside [0, " + std::to_string(k) + ")");
    }
    auto in = logits.row(r);
    double m = *std::max_element(in.begin(), in.end());
    double s = 0.0;
    for (double v : in) s += std::exp(v - m);
    // (m - x_t) >= 0 and log(s) >= 0 because s includes exp(0).
    total += (m - in[targets[r]]) + std::log(s);
  }
  return total / static_cast<double>(b);
}

// ---- differentiable ops --------------------------------------------------

Var matmul(Var a, Var b) {
  return a.graph().record(
      {a, b}, [](auto in) { return matmul(*in[0], *in[1]); },
      [](auto in, const Tensor &, std::span<const double> g, auto gin) {
        const Tensor &A = *in[0], &B = *in[1];
        const std::size_t m = A.dim(0), k = A.dim(1), n = B.dim(1);
        if (gin[0]) {
          // dA[i,p] += sum_j g[i,j] B[p,j]
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t p = 0; p < k; ++p) {
              double s = 0.0;
              for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * B[p * n + j];
              (*gin[0])[i * k + p] += s;
            }
        }
        if (gin[1]) {
          // dB[p,j] += sum_i A[i,p] g[i,j]
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t p = 0; p < k; ++p) {
              const double aip = A[i * k + p];
              for (std::size_t j = 0; j < n; ++j) (*gin[1])[p * n + j] += aip * g[i * n + j];
            }
        }
      });
}

Var transpose(Var a) {
  return a.graph().record(
      {a},
      [](auto in) {
        const Tensor &x = *in[0];
        require_rank2(x, "transpose");
        const std::size_t m = x.dim(0), n = x.dim(1);
        Tensor out(Shape{n, m});
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) out[j * m + i] = x[i * n + j];
        return out;
      },
      [](auto in, const Tensor &, std::span<const double> g, auto gin) {
        const std::size_t m = in[0]->dim(0), n = in[0]->dim(1);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) (*gin[0])[i * n + j] += g[j * m + i];
      });
}

Var add(Var a, Var b) {
  return a.graph().record(
      {a, b},
      [](auto in) {
        require_same_shape(*in[0], *in[1], "add");
        Tensor out = *in[0];
        for (std::size_t i = 0; i < out.numel(); ++i) out[i] += (*in[1])[i];
        return out;
      },
      [](auto, const Tensor &, std::span<const double> g, auto gin) {
        add_into(gin[0], g);
        add_into(gin[1], g);
      });
}

Var sub(Var a, Var b) {
  return a.graph().record(
      {a, b},
      [](auto in) {
        require_same_shape(*in[0], *in[1], "sub");
        Tensor out = *in[0];
        for (std::size_t i = 0; i < out.numel(); ++i) out[i] -= (*in[1])[i];
        return out;
      },
      [](auto, const Tensor &, std::span<const double> g, auto gin) {
        add_into(gin[0], g);
        if (gin[1])
          for (std::size_t i = 0; i < g.size(); ++i) (*gin[1])[i] -= g[i];
      });
}

Var mul(Var a, Var b) {
  return a.graph().record(
      {a, b},
      [](auto in) {
        require_same_shape(*in[0], *in[1], "mul");
        Tensor out = *in[0];
        for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= (*in[1])[i];
        return out;
      },
      [](auto in, const Tensor &, std::span<const double> g, auto gin) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (gin[0]) (*gin[0])[i] += g[i] * (*in[1])[i];
          if (gin[1]) (*gin[1])[i] += g[i] * (*in[0])[i];
        }
      });
}

Var add_row_vector(Var x, Var bias) {
  return x.graph().record(
      {x, bias},
      [](auto in) {
        const Tensor &v = *in[0], &b = *in[1];
        require_rank2(v, "add_row_vector");
        if (b.numel() != v.dim(1)) {
          throw ShapeError("add_row_vector: bias " + shape_str(b.shape()) + " for rows of " + shape_str(v.shape()));
        }
        Tensor out = v;
        const std::size_t n = v.dim(1);
        for (std::size_t i = 0; i < out.numel(); ++i) out[i] += b[i % n];
        return out;
      },
      [](auto in, const Tensor &, std::span<const double> g, auto gin) {
        add_into(gin[0], g);
        if (gin[1]) {
          const std::size_t n = in[0]->dim(1);
          for (std::size_t i = 0; i < g.size(); ++i) (*gin[1])[i % n] += g[i];
        }
      });
}

Var scale(Var x, double factor) {
  return x.graph().record(
      {x},
      [factor](auto in) {
        Tensor out = *in[0];
        for (auto &v : out.values()) v *= factor;
        return out;
      },
      [factor](auto, const Tensor &, std::span<const double> g, auto gin) {
        for (std::size_t i = 0; i < g.size(); ++i) (*gin[0])[i] += factor * g[i];
      });
}

Var scale_by(Var x, Var factor) {
  return x.graph().record(
      {x, factor},
      [](auto in) {
        if (in[1]->numel() != 1) throw ShapeError("scale_by expects a one-element factor, got " + shape_str(in[1]->shape()));
        Tensor out = *in[0];
        const double s = (*in[1])[0];
        for (auto &v : out.values()) v *= s;
        return out;
      },
      [](auto in, const Tensor &, std::span<const double> g, auto gin) {
        const double s = (*in[1])[0];
        if (gin[0])
          for (std::size_t i = 0; i < g.size(); ++i) (*gin[0])[i] += s * g[i];
        if (gin[1]) {
          double acc = 0.0;
          for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * (*in[0])[i];
          (*gin[1])[0] += acc;
        }
      });
}

Var relu(Var x) {
  Graph *graph = &x.graph();
  return graph->record(
      {x},
      [graph](auto in) {
        Tensor out = *in[0];
        double margin = std::numeric_limits<double>::infinity();
        for (auto &v : out.values()) {
          margin = std::min(margin, std::abs(v));
          if (v <= 0.0) v = 0.0;
        }
        graph->note_relu_margin(margin);
        return out;
      },
      [](auto in, const Tensor &, std::span<const double> g, auto gin) {
        for (std::size_t i = 0; i < g.size(); ++i)
          if ((*in[0])[i] > 0.0) (*gin[0])[i] += g[i];
      });
}

Var sum(Var x) {
  return x.graph().record(
      {x},
      [](auto in) {
        double s = 0.0;
        for (double v : in[0]->data()) s += v;
        return Tensor::scalar(s);
      },
      [](auto, const Tensor &, std::span<const double> g, auto gin) {
        for (auto &v : *gin[0]) v += g[0];
      });
}

Var reshape(Var x, Shape shape) {
  return x.graph().record(
      {x}, [shape](auto in) { return in[0]->reshaped(shape); },
      [](auto, const Tensor &, std::span<const double> g, auto gin) { add_into(gin[0], g); });
}

Var l2_normalize(Var x, double epsilon) {
  return x.graph().record(
      {x}, [epsilon](auto in) { return l2_normalize(*in[0], epsilon); },
      [epsilon](auto in, const Tensor &out, std::span<const double> g, auto gin) {
        const Tensor &v = *in[0];
        const std::size_t d = v.cols();
        for (std::size_t r = 0; r < v.rows(); ++r) {
          auto xr = v.row(r);
          auto yr = out.row(r);
          double sq = 0.0;
          for (double e : xr) sq += e * e;
          const double norm = std::sqrt(sq);
          const std::size_t off = r * d;
          if (norm > epsilon) {
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j) dot += yr[j] * g[off + j];
            for (std::size_t j = 0; j < d; ++j) (*gin[0])[off + j] += (g[off + j] - yr[j] * dot) / norm;
          } else {
            for (std::size_t j = 0; j < d; ++j) (*gin[0])[off + j] += g[off + j] / epsilon;
          }
        }
      });
}

Var softmax(Var logits, double temperature) {
  if (!(temperature > 0.0)) throw ParameterError("softmax temperature must be positive");
  return logits.graph().record(
      {logits}, [temperature](auto in) { return softmax(*in[0], temperature); },
      [temperature](auto, const Tensor &out, std::span<const double> g, auto gin) {
        const std::size_t k = out.cols();
        for (std::size_t r = 0; r < out.rows(); ++r) {
          auto y = out.row(r);
          const std::size_t off = r * k;
          double dot = 0.0;
          for (std::size_t j = 0; j < k; ++j) dot += y[j] * g[off + j];
          for (std::size_t j = 0; j < k; ++j) (*gin[0])[off + j] += y[j] * (g[off + j] - dot) / temperature;
        }
      });
}

Var cross_entropy(Var logits, std::vector<std::size_t> targets) {
  return logits.graph().record(
      {logits}, [targets](auto in) { return Tensor::scalar(cross_entropy(*in[0], targets)); },
      [targets](auto in, const Tensor &, std::span<const double> g, auto gin) {
        const Tensor p = softmax(*in[0], 1.0);
        const std::size_t b = p.dim(0), k = p.dim(1);
        const double w = g[0] / static_cast<double>(b);
        for (std::size_t r = 0; r < b; ++r) {
          for (std::size_t j = 0; j < k; ++j) {
            double d = p[r * k + j] - (j == targets[r] ? 1.0 : 0.0);
            (*gin[0])[r * k + j] += w * d;
          }
        }
      });
}

Var gather_rows(Var x, std::vector<std::size_t> rows) {
  return x.graph().record(
      {x},
      [rows](auto in) {
        const Tensor &v = *in[0];
        require_rank2(v, "gather_rows");
        const std::size_t n = v.dim(1);
        Tensor out(Shape{rows.size(), n});
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i] >= v.dim(0)) throw IndexError("gather_rows: row " + std::to_string(rows[i]) + " out of range");
          std::copy_n(v.row(rows[i]).begin(), n, out.row(i).begin());
        }
        return out;
      },
      [rows](auto in, const Tensor &, std::span<const double> g, auto gin) {
        const std::size_t n = in[0]->dim(1);
        for (std::size_t i = 0; i < rows.size(); ++i)
          for (std::size_t j = 0; j < n; ++j) (*gin[0])[rows[i] * n + j] += g[i * n + j];
      });
}

Var concat_rows(Var top, Var bottom) {
  return top.graph().record(
      {top, bottom},
      [](auto in) {
        const Tensor &a = *in[0], &b = *in[1];
        require_rank2(a, "concat_rows");
        require_rank2(b, "concat_rows");
        if (a.dim(1) != b.dim(1)) {
          throw ShapeError("concat_rows: column mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
        }
        std::vector<double> data(a.values());
        data.insert(data.end(), b.values().begin(), b.values().end());
        return Tensor(Shape{a.dim(0) + b.dim(0), a.dim(1)}, std::move(data));
      },
      [](auto in, const Tensor &, std::span<const double> g, auto gin) {
        const std::size_t na = in[0]->numel();
        if (gin[0])
          for (std::size_t i = 0; i < na; ++i) (*gin[0])[i] += g[i];
        if (gin[1])
          for (std::size_t i = 0; i < in[1]->numel(); ++i) (*gin[1])[i] += g[na + i];
      });
}

Var mean_over_shots(Var x) {
  return x.graph().record(
      {x},
      [](auto in) {
        const Tensor &v = *in[0];
        if (v.rank() != 3) throw ShapeError("mean_over_shots expects [groups x shots x d], got " + shape_str(v.shape()));
        const std::size_t groups = v.dim(0), shots = v.dim(1), d = v.dim(2);
        if (shots == 0) throw ShapeError("mean_over_shots with zero shots");
        Tensor out(Shape{groups, d});
        std::vector<double> column(shots);
        for (std::size_t gi = 0; gi < groups; ++gi) {
          for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t s = 0; s < shots; ++s) column[s] = v[(gi * shots + s) * d + j];
            out[gi * d + j] = sorted_sum(column) / static_cast<double>(shots);
          }
        }
        return out;
      },
      [](auto in, const Tensor &, std::span<const double> g, auto gin) {
        const std::size_t groups = in[0]->dim(0), shots = in[0]->dim(1), d = in[0]->dim(2);
        const double w = 1.0 / static_cast<double>(shots);
        for (std::size_t gi = 0; gi < groups; ++gi)
          for (std::size_t s = 0; s < shots; ++s)
            for (std::size_t j = 0; j < d; ++j) (*gin[0])[(gi * shots + s) * d + j] += w * g[gi * d + j];
      });
}

}  // namespace ipl
