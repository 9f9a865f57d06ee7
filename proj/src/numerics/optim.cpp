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

#include "numerics/optim.hpp"

#include <algorithm>
#include <cmath>

#include "numerics/error.hpp"

namespace ipl {

void sgd_step(std::span<Tensor *const> params, double lr, double weight_decay) {
  if (!(lr >= 0.0)) throw ParameterError("sgd_step: learning rate must be >= 0");
  if (!(weight_decay >= 0.0)) throw ParameterError("sgd_step: weight decay must be >= 0");
  for (const Tensor *p : params) {
    if (!p->requires_grad()) throw StateError("sgd_step: parameter " + shape_str(p->shape()) + " does not require grad");
    if (!p->has_grad()) throw StateError("sgd_step: missing gradient on parameter " + shape_str(p->shape()));
  }
  for (Tensor *p : params) {
    if (lr != 0.0) {
      auto g = p->grad();
      auto v = p->data();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * (g[i] + weight_decay * v[i]);
    }
    p->clear_grad();
  }
}

GradCheckResult grad_check_detailed(const ScalarFn &fn, const Tensor &point, double step, double floor) {
  Tensor x(point.shape(), point.values());
  x.set_requires_grad(true);
  GradCheckResult result;
  std::vector<double> analytic;
  {
    Graph g;
    Var loss = fn(g, g.parameter(x));
    g.backward(loss);
    result.relu_margin = g.min_relu_margin();
    if (x.has_grad()) {
      analytic.assign(x.grad().begin(), x.grad().end());
    } else {
      analytic.assign(x.numel(), 0.0);
    }
  }
  auto eval = [&](const Tensor &at) {
    Graph g;
    return fn(g, g.constant(at)).value().item();
  };
  Tensor probe(point.shape(), point.values());
  for (std::size_t i = 0; i < probe.numel(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + step;
    const double fp = eval(probe);
    probe[i] = orig - step;
    const double fm = eval(probe);
    probe[i] = orig;
    const double numeric = (fp - fm) / (2.0 * step);
    const double abs_err = std::abs(analytic[i] - numeric);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    result.max_abs_error = std::max(result.max_abs_error, abs_err);
    result.max_relative_error = std::max(result.max_relative_error, abs_err / denom);
  }
  return result;
}

double grad_check(const ScalarFn &fn, const Tensor &point, double step) {
  return grad_check_detailed(fn, point, step).max_relative_error;
}

}  // namespace ipl
