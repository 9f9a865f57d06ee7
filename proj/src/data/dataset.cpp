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

#include "data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "numerics/error.hpp"

namespace ipl {

Dataset::Dataset(std::size_t dim) : features_(Shape{0, dim}) {}

Dataset::Dataset(Tensor features, std::vector<int> labels) : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rank() != 2) throw ShapeError("dataset features must be a matrix, got " + shape_str(features_.shape()));
  if (features_.dim(0) != labels_.size()) {
    throw ShapeError("dataset has " + std::to_string(features_.dim(0)) + " rows but " + std::to_string(labels_.size()) +
                     " labels");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) class_index_[labels_[i]].push_back(i);
}

std::vector<int> Dataset::classes() const {
  std::vector<int> out;
  out.reserve(class_index_.size());
  for (const auto &[cls, _] : class_index_) out.push_back(cls);
  return out;
}

const std::vector<std::size_t> &Dataset::indices_of(int cls) const {
  auto it = class_index_.find(cls);
  if (it == class_index_.end()) throw DataError("class " + std::to_string(cls) + " not present in dataset");
  return it->second;
}

Tensor Dataset::gather(std::span<const std::size_t> indices) const {
  const std::size_t d = dim();
  Tensor out(Shape{indices.size(), d});
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= size()) throw IndexError("dataset row " + std::to_string(indices[i]) + " out of range");
    std::copy_n(features_.row(indices[i]).begin(), d, out.row(i).begin());
  }
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<int> labels;
  labels.reserve(indices.size());
  Tensor feats = gather(indices);
  for (auto i : indices) labels.push_back(labels_[i]);
  return Dataset(std::move(feats), std::move(labels));
}

Dataset Dataset::select_classes(std::span<const int> classes) const {
  std::vector<std::size_t> rows;
  for (int cls : classes) {
    const auto &idx = indices_of(cls);
    rows.insert(rows.end(), idx.begin(), idx.end());
  }
  std::sort(rows.begin(), rows.end());
  return subset(rows);
}

Dataset Dataset::concat(const Dataset &a, const Dataset &b) {
  if (a.dim() != b.dim()) {
    throw ShapeError("cannot concatenate datasets of dim " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
  std::vector<double> data(a.features_.values());
  data.insert(data.end(), b.features_.values().begin(), b.features_.values().end());
  std::vector<int> labels(a.labels_);
  labels.insert(labels.end(), b.labels_.begin(), b.labels_.end());
  Tensor feats(Shape{labels.size(), a.dim()}, std::move(data));
  return Dataset(std::move(feats), std::move(labels));
}

Dataset generate_gaussian_mixture(std::size_t num_classes, std::size_t dim, std::size_t samples_per_class,
                                  double separation, double noise_sigma, Rng &rng) {
  if (num_classes == 0 || dim == 0 || samples_per_class == 0) throw ParameterError("gaussian mixture counts must be positive");
  if (!(separation > 0.0) || !(noise_sigma > 0.0)) throw ParameterError("separation and noise_sigma must be positive");
  std::vector<double> means(num_classes * dim);
  for (std::size_t c = 0; c < num_classes; ++c) {
    double sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      means[c * dim + j] = rng.normal();
      sq += means[c * dim + j] * means[c * dim + j];
    }
    const double norm = std::sqrt(sq);
    for (std::size_t j = 0; j < dim; ++j) means[c * dim + j] *= separation / norm;
  }
  const std::size_t n = num_classes * samples_per_class;
  Tensor feats(Shape{n, dim});
  std::vector<int> labels(n);
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::size_t s = 0; s < samples_per_class; ++s) {
      const std::size_t r = c * samples_per_class + s;
      labels[r] = static_cast<int>(c);
      for (std::size_t j = 0; j < dim; ++j) feats[r * dim + j] = means[c * dim + j] + noise_sigma * rng.normal();
    }
  }
  return Dataset(std::move(feats), std::move(labels));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double &out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, int &out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Dataset load_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  std::size_t d = 0;
  bool have_row = false;
  std::vector<double> data;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    auto fields = split_fields(view);
    int label = 0;
    if (!parse_int(fields[0], label)) {
      double probe;
      if (line_no == 1 && !parse_double(fields[0], probe)) continue;  // header
      throw FormatError(path + ":" + std::to_string(line_no) + ": label '" + std::string(fields[0]) + "' is not an integer");
    }
    const std::size_t row_d = fields.size() - 1;
    if (row_d == 0) throw FormatError(path + ":" + std::to_string(line_no) + ": row has no features");
    if (!have_row) {
      d = row_d;
      have_row = true;
    } else if (row_d != d) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(d) + " features, found " +
                        std::to_string(row_d));
    }
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double v;
      if (!parse_double(fields[j], v)) {
        throw FormatError(path + ":" + std::to_string(line_no) + ": feature " + std::to_string(j) + " '" +
                          std::string(fields[j]) + "' is not a finite number");
      }
      data.push_back(v);
    }
    labels.push_back(label);
  }
  if (labels.empty()) throw FormatError(path + ": no data rows");
  Tensor feats(Shape{labels.size(), d}, std::move(data));
  return Dataset(std::move(feats), std::move(labels));
}

void save_csv(const Dataset &data, const std::string &path, bool header) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  const std::size_t d = data.dim();
  if (header) {
    out << "label";
    for (std::size_t j = 0; j < d; ++j) out << ",f" << (j + 1);
    out << '\n';
  }
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.labels()[i];
    for (double v : data.features().row(i)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace ipl
