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

#ifndef IPL_NUMERICS_TENSOR_HPP_
#define IPL_NUMERICS_TENSOR_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ipl {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape &shape);
std::string shape_str(const Shape &shape);

// Dense row-major double tensor. A tensor with requires_grad set is a
// trainable leaf: backward() accumulates into its gradient buffer, which
// always has the same element count as the data.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double value);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);

  const Shape &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t numel() const { return data_.size(); }
  std::size_t dim(std::size_t axis) const;

  // Length of the last axis, and the number of such rows.
  std::size_t cols() const;
  std::size_t rows() const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double> &values() { return data_; }
  const std::vector<double> &values() const { return data_; }

  double &operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double &at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  double item() const;

  std::span<const double> row(std::size_t r) const;
  std::span<double> row(std::size_t r);

  Tensor reshaped(Shape shape) const;

  bool requires_grad() const { return requires_grad_; }
  Tensor &set_requires_grad(bool flag);

  bool has_grad() const { return grad_valid_; }
  std::span<const double> grad() const { return grad_; }
  std::span<double> grad() { return grad_; }
  // Adds g into the gradient buffer, allocating it on first use.
  void accumulate_grad(std::span<const double> g);
  void zero_grad();
  void clear_grad();

  bool all_finite() const;
  bool same_values(const Tensor &other) const;

 private:
  Shape shape_;
  std::vector<double> data_;
  std::vector<double> grad_;
  bool requires_grad_ = false;
  bool grad_valid_ = false;
};

}  // namespace ipl

#endif  // IPL_NUMERICS_TENSOR_HPP_
