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

#ifndef IPL_NUMERICS_OPTIM_HPP_
#define IPL_NUMERICS_OPTIM_HPP_

#include <functional>
#include <span>

#include "numerics/graph.hpp"
#include "numerics/tensor.hpp"

namespace ipl {

// p <- p - lr * (grad + weight_decay * p), then clears every gradient.
// Each tensor must require grad and carry a populated gradient.
void sgd_step(std::span<Tensor *const> params, double lr, double weight_decay);

// Builds the scalar function on a fresh graph; the Var argument is the point.
using ScalarFn = std::function<Var(Graph &, Var)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  double max_abs_error = 0.0;
  // Smallest relu input magnitude seen at the point; a value below the
  // step size means a kink may lie inside the stencil.
  double relu_margin = 0.0;
};

// Compares the tape gradient of fn at point against central differences
// (f(x+h) - f(x-h)) / 2h. Relative error per coordinate is
// |analytic - numeric| / max(|analytic|, |numeric|, floor).
GradCheckResult grad_check_detailed(const ScalarFn &fn, const Tensor &point, double step = 1e-5,
                                    double floor = 1e-6);

double grad_check(const ScalarFn &fn, const Tensor &point, double step = 1e-5);

}  // namespace ipl

#endif  // IPL_NUMERICS_OPTIM_HPP_
