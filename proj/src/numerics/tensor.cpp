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

#include "numerics/tensor.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "numerics/error.hpp"

namespace ipl {

std::size_t shape_numel(const Shape &shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape &shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  data_.assign(shape_numel(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_numel(shape_) != data_.size()) {
    throw ShapeError("tensor shape " + shape_str(shape_) + " does not match " + std::to_string(data_.size()) +
                     " values");
  }
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, std::vector<double>{value}); }

Tensor Tensor::vector(std::vector<double> values) {
  Shape s{values.size()};
  return Tensor(std::move(s), std::move(values));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto &row : rows) {
    if (row.size() != c) throw ShapeError("ragged matrix literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor(Shape{r, c}, std::move(data));
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) throw ShapeError("axis " + std::to_string(axis) + " out of range for " + shape_str(shape_));
  return shape_[axis];
}

std::size_t Tensor::cols() const { return shape_.empty() ? 1 : shape_.back(); }

std::size_t Tensor::rows() const {
  std::size_t c = cols();
  return c == 0 ? 0 : data_.size() / c;
}

double Tensor::item() const {
  if (data_.size() != 1) throw ShapeError("item() on tensor of shape " + shape_str(shape_));
  return data_[0];
}

std::span<const double> Tensor::row(std::size_t r) const {
  return std::span<const double>(data_).subspan(r * cols(), cols());
}

std::span<double> Tensor::row(std::size_t r) { return std::span<double>(data_).subspan(r * cols(), cols()); }

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_numel(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + shape_str(shape_) + " to " + shape_str(shape));
  }
  return Tensor(std::move(shape), data_);
}

Tensor &Tensor::set_requires_grad(bool flag) {
  requires_grad_ = flag;
  return *this;
}

void Tensor::accumulate_grad(std::span<const double> g) {
  if (g.size() != data_.size()) throw ShapeError("gradient size mismatch for " + shape_str(shape_));
  if (!grad_valid_) {
    grad_.assign(g.begin(), g.end());
    grad_valid_ = true;
    return;
  }
  for (std::size_t i = 0; i < g.size(); ++i) grad_[i] += g[i];
}

void Tensor::zero_grad() {
  grad_.assign(data_.size(), 0.0);
  grad_valid_ = true;
}

void Tensor::clear_grad() {
  grad_.clear();
  grad_valid_ = false;
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool Tensor::same_values(const Tensor &other) const {
  return shape_ == other.shape_ && data_.size() == other.data_.size() &&
         (data_.empty() || std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(double)) == 0);
}

}  // namespace ipl
