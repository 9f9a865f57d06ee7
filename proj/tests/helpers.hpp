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
#ifndef IPL_TESTS_HELPERS_HPP_
#define IPL_TESTS_HELPERS_HPP_

#include <cmath>
#include <filesystem>
#include <string>

#include "numerics/rng.hpp"
#include "numerics/tensor.hpp"
#include "oracles.hpp"

namespace testing {

inline oracle::Mat to_mat(const ipl::Tensor &t) {
  oracle::Mat m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t.at(r, c);
  return m;
}

inline ipl::Tensor from_mat(const oracle::Mat &m) {
  ipl::Tensor t(ipl::Shape{m.size(), m.empty() ? 0 : m[0].size()});
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m[r].size(); ++c) t.at(r, c) = m[r][c];
  return t;
}

inline ipl::Tensor random_tensor(ipl::Shape shape, ipl::Rng &rng, double scale = 1.0) {
  ipl::Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = scale * rng.normal();
  return t;
}

inline double max_abs_diff(const oracle::Mat &a, const oracle::Mat &b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
  return worst;
}

inline double max_abs_diff(const ipl::Tensor &a, const ipl::Tensor &b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// Fresh per-test scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / ("ipl_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing

#endif  // IPL_TESTS_HELPERS_HPP_
