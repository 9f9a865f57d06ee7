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

#ifndef IPL_DATA_DATASET_HPP_
#define IPL_DATA_DATASET_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "numerics/rng.hpp"
#include "numerics/tensor.hpp"

namespace ipl {

// Feature matrix [num_samples x dim] with one integer class id per row.
// Immutable once built; class_index partitions the row indices.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t dim);
  Dataset(Tensor features, std::vector<int> labels);

  const Tensor &features() const { return features_; }
  const std::vector<int> &labels() const { return labels_; }
  const std::map<int, std::vector<std::size_t>> &class_index() const { return class_index_; }

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return features_.rank() == 2 ? features_.dim(1) : 0; }
  bool empty() const { return labels_.empty(); }
  std::vector<int> classes() const;
  bool has_class(int cls) const { return class_index_.count(cls) != 0; }
  const std::vector<std::size_t> &indices_of(int cls) const;

  // Rows in the given order, as a dataset or a bare feature matrix.
  Dataset subset(std::span<const std::size_t> indices) const;
  Tensor gather(std::span<const std::size_t> indices) const;
  Dataset select_classes(std::span<const int> classes) const;

  static Dataset concat(const Dataset &a, const Dataset &b);

 private:
  Tensor features_;
  std::vector<int> labels_;
  std::map<int, std::vector<std::size_t>> class_index_;
};

// Class means on a sphere of radius separation (normalized standard normal
// directions), samples = mean + noise_sigma * N(0, I). Labels are 0..C-1,
// stored class by class.
Dataset generate_gaussian_mixture(std::size_t num_classes, std::size_t dim, std::size_t samples_per_class,
                                  double separation, double noise_sigma, Rng &rng);

// label,f1,...,fd per line. A first line whose first field is not a number
// is treated as a header. Values are written in shortest round-trip form.
Dataset load_csv(const std::string &path);
void save_csv(const Dataset &data, const std::string &path, bool header = true);

}  // namespace ipl

#endif  // IPL_DATA_DATASET_HPP_
