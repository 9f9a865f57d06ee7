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

#ifndef IPL_NUMERICS_GRAPH_HPP_
#define IPL_NUMERICS_GRAPH_HPP_

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "numerics/tensor.hpp"

namespace ipl {

class Graph;

// Handle to a node of a Graph. Cheap to copy; only valid while its graph lives.
class Var {
 public:
  Var() = default;

  const Tensor &value() const;
  std::span<const double> grad() const;
  const Shape &shape() const { return value().shape(); }
  Graph &graph() const { return *graph_; }
  std::size_t id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

 private:
  friend class Graph;
  Var(Graph *graph, std::size_t id) : graph_(graph), id_(id) {}

  Graph *graph_ = nullptr;
  std::size_t id_ = 0;
};

using ForwardFn = std::function<Tensor(std::span<const Tensor *const> inputs)>;

// Adds the contribution of out_grad to every input gradient that is not
// null. Input gradients are pre-sized to their input's element count.
using BackwardFn = std::function<void(std::span<const Tensor *const> inputs, const Tensor &output,
                                      std::span<const double> out_grad, std::span<std::vector<double> *const> in_grads)>;

// Tape for reverse-mode differentiation over whole-tensor operations. Nodes
// are stored in creation order, which is a topological order; backward()
// visits them in reverse exactly once.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph &) = delete;
  Graph &operator=(const Graph &) = delete;

  // Leaf holding a copy of value; never receives gradient.
  Var constant(Tensor value);

  // Leaf bound to a tensor owned by the caller. If the tensor requires grad,
  // backward() accumulates into its gradient buffer. Binding the same tensor
  // twice yields the same node.
  Var parameter(Tensor &tensor);

  Var record(std::vector<Var> inputs, ForwardFn forward, BackwardFn backward);

  // Seeds d(loss)/d(loss) = 1, propagates, then accumulates leaf gradients
  // into bound tensors. loss must hold exactly one element.
  void backward(Var loss);

  // Recomputes every node from its inputs in creation order. Bound leaves
  // re-read their tensor, constants keep their stored value.
  void replay();

  const Tensor &value(std::size_t id) const { return nodes_.at(id).value; }
  std::span<const double> grad(std::size_t id) const { return nodes_.at(id).grad; }
  std::size_t size() const { return nodes_.size(); }

  // Smallest |x| fed into any relu so far; finite-difference checks use it to
  // avoid sampling across a kink.
  double min_relu_margin() const { return min_relu_margin_; }
  void note_relu_margin(double margin);

 private:
  struct Node {
    Tensor value;
    std::vector<double> grad;
    std::vector<std::size_t> inputs;
    ForwardFn forward;
    BackwardFn backward;
    Tensor *bound = nullptr;
    bool needs_grad = false;
  };

  std::vector<Node> nodes_;
  std::unordered_map<const Tensor *, std::size_t> bound_ids_;
  double min_relu_margin_ = std::numeric_limits<double>::infinity();
};

// ---- operations ---------------------------------------------------------

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var add_row_vector(Var x, Var bias);
Var scale(Var x, double factor);
Var scale_by(Var x, Var factor);
Var relu(Var x);
Var sum(Var x);
Var reshape(Var x, Shape shape);
Var l2_normalize(Var x, double epsilon = 1e-12);
Var softmax(Var logits, double temperature = 1.0);
Var cross_entropy(Var logits, std::vector<std::size_t> targets);
Var gather_rows(Var x, std::vector<std::size_t> rows);
Var concat_rows(Var top, Var bottom);

// Mean over axis 1 of a [groups x shots x d] tensor. Each coordinate sums its
// shots in ascending value order, so the result is bitwise invariant under
// any permutation of shots within a group.
Var mean_over_shots(Var x);

// Value-only kernels shared with code that needs no tape.
Tensor matmul(const Tensor &a, const Tensor &b);
Tensor softmax(const Tensor &logits, double temperature = 1.0);
Tensor l2_normalize(const Tensor &x, double epsilon = 1e-12);
double cross_entropy(const Tensor &logits, std::span<const std::size_t> targets);
double sorted_sum(std::vector<double> &values);

}  // namespace ipl

#endif  // IPL_NUMERICS_GRAPH_HPP_
