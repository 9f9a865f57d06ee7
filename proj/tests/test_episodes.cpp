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
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "episodes/episodes.hpp"
#include "helpers.hpp"
#include "numerics/error.hpp"

using namespace ipl;

namespace {

// Each row holds its own index in column 0, so draws can be traced back.
Dataset indexed_dataset(std::size_t classes, std::size_t per_class) {
  Tensor x(Shape{classes * per_class, 2});
  std::vector<int> y;
  for (std::size_t i = 0; i < classes * per_class; ++i) {
    x.at(i, 0) = static_cast<double>(i);
    x.at(i, 1) = static_cast<double>(i / per_class);
    y.push_back(static_cast<int>(i / per_class));
  }
  return Dataset(x, y);
}

PrototypeBank bank_of(std::vector<int> ids, std::size_t dim, Rng &rng) {
  Tensor protos = testing::random_tensor({ids.size(), dim}, rng);
  return PrototypeBank(std::move(protos), std::move(ids), Tensor::scalar(10.0));
}

}  // namespace

TEST_SUITE("sample_episode") {
  TEST_CASE("structure") {
    const Dataset base = indexed_dataset(10, 20);
    Rng rng(1);
    const Episode ep = sample_episode(base, EpisodeConfig{}, rng);
    CHECK(ep.support_ids.size() == 5);
    CHECK(std::set<int>(ep.support_ids.begin(), ep.support_ids.end()).size() == 5);
    CHECK(ep.support.shape() == Shape{25, 2});
    CHECK(ep.k_shot == 5);
    CHECK(ep.eliminated_ids == ep.support_ids);
    // class-major: rows 5i..5i+4 belong to support_ids[i], all distinct
    std::set<double> rows;
    for (std::size_t r = 0; r < 25; ++r) {
      CHECK(ep.support.at(r, 1) == ep.support_ids[r / 5]);
      rows.insert(ep.support.at(r, 0));
    }
    CHECK(rows.size() == 25);
    // queries: 200 - 25 available, capped at 128, never from the support set
    CHECK(ep.query.dim(0) == 128);
    CHECK(ep.query_labels.size() == 128);
    std::set<double> qrows;
    for (std::size_t r = 0; r < ep.query.dim(0); ++r) {
      CHECK_FALSE(rows.count(ep.query.at(r, 0)));
      CHECK(ep.query_labels[r] == static_cast<int>(ep.query.at(r, 1)));
      qrows.insert(ep.query.at(r, 0));
    }
    CHECK(qrows.size() == 128);
  }

  TEST_CASE("query batch capped by the pool") {
    const Dataset base = indexed_dataset(5, 6);
    Rng rng(2);
    const Episode ep = sample_episode(base, EpisodeConfig{}, rng);
    CHECK(ep.query.dim(0) == 5);
  }

  TEST_CASE("deterministic under a fixed seed") {
    const Dataset base = indexed_dataset(10, 20);
    Rng a(9), b(9);
    for (int i = 0; i < 5; ++i) {
      const Episode ea = sample_episode(base, EpisodeConfig{}, a), eb = sample_episode(base, EpisodeConfig{}, b);
      CHECK(ea.support_ids == eb.support_ids);
      CHECK(ea.support.same_values(eb.support));
      CHECK(ea.query.same_values(eb.query));
    }
  }

  TEST_CASE("errors") {
    Rng rng(3);
    EpisodeConfig cfg;
    cfg.n_way = 11;
    CHECK_THROWS_AS(sample_episode(indexed_dataset(10, 20), cfg, rng), DataError);
    cfg = EpisodeConfig{};
    cfg.k_shot = 20;
    CHECK_THROWS_AS(sample_episode(indexed_dataset(10, 10), cfg, rng), DataError);
    cfg = EpisodeConfig{};
    cfg.k_shot = 0;
    CHECK_THROWS_AS(sample_episode(indexed_dataset(10, 10), cfg, rng), ConfigError);
    cfg = EpisodeConfig{};
    cfg.updates_per_episode = 2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    // every sample consumed by the support set
    cfg = EpisodeConfig{};
    cfg.n_way = 5;
    cfg.k_shot = 4;
    CHECK_THROWS_AS(sample_episode(indexed_dataset(5, 4), cfg, rng), DataError);
  }

  TEST_CASE("class and shot frequencies are uniform") {
    const Dataset base = indexed_dataset(10, 10);
    Rng rng(4);
    EpisodeConfig cfg;
    cfg.query_batch = 1;
    std::map<int, int> class_count;
    std::map<double, int> sample_count;
    for (int e = 0; e < 1000; ++e) {
      const Episode ep = sample_episode(base, cfg, rng);
      for (int c : ep.support_ids) ++class_count[c];
      for (std::size_t r = 0; r < ep.support.dim(0); ++r) ++sample_count[ep.support.at(r, 0)];
    }
    // 1000 * 5 / 10 selections per class; each chosen class picks half its samples
    for (const auto &[c, n] : class_count) {
      CHECK(n >= 400);
      CHECK(n <= 600);
    }
    CHECK(class_count.size() == 10);
    for (const auto &[s, n] : sample_count) {
      CHECK(n >= 200);
      CHECK(n <= 300);
    }
  }
}

TEST_SUITE("class_mean_embeddings") {
  TEST_CASE("one shot is the identity") {
    Rng rng(5);
    const Tensor x = testing::random_tensor({3, 1, 4}, rng);
    CHECK(class_mean_embeddings(x).same_values(x.reshaped({3, 4})));
  }

  TEST_CASE("two-shot mean") {
    const Tensor x(Shape{1, 2, 2}, {1, 0, 0, 1});
    CHECK(class_mean_embeddings(x).same_values(Tensor::matrix({{0.5, 0.5}})));
  }

  TEST_CASE("bitwise invariant under shot permutation") {
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 3, k = 5, d = 7;
      const Tensor x = testing::random_tensor({n, k, d}, rng, 1e3);
      std::vector<std::size_t> perm(k);
      for (std::size_t i = 0; i < k; ++i) perm[i] = i;
      rng.shuffle(perm);
      Tensor y(x.shape());
      for (std::size_t g = 0; g < n; ++g)
        for (std::size_t s = 0; s < k; ++s)
          for (std::size_t j = 0; j < d; ++j) y[(g * k + s) * d + j] = x[(g * k + perm[s]) * d + j];
      CHECK(class_mean_embeddings(x).same_values(class_mean_embeddings(y)));
    }
  }

  TEST_CASE("rank must be three") {
    CHECK_THROWS_AS(class_mean_embeddings(Tensor(Shape{2, 2})), ShapeError);
  }
}

TEST_SUITE("eliminate_prototypes") {
  TEST_CASE("keeps the complement in bank order") {
    Rng rng(7);
    const PrototypeBank bank = bank_of({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, 4, rng);
    const std::vector<int> drop{7, 2, 4};
    const PrototypeBank kept = eliminate_prototypes(bank, drop);
    CHECK(kept.class_ids() == std::vector<int>{0, 1, 3, 5, 6, 8, 9});
    for (int c : kept.class_ids()) {
      const auto a = kept.prototype(c), b = bank.prototype(c);
      CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
    CHECK(kept.scale_value() == bank.scale_value());
    CHECK(surviving_rows(bank, drop) == std::vector<std::size_t>{0, 1, 3, 5, 6, 8, 9});
  }

  TEST_CASE("errors") {
    Rng rng(8);
    const PrototypeBank bank = bank_of({0, 1, 2}, 3, rng);
    CHECK_THROWS_AS(eliminate_prototypes(bank, std::vector<int>{0, 1, 2}), DataError);
    CHECK_THROWS_AS(eliminate_prototypes(bank, std::vector<int>{5}), DataError);
    CHECK_THROWS_AS(eliminate_prototypes(bank, std::vector<int>{1, 1}), DataError);
  }

  TEST_CASE("re-inserting the eliminated rows reconstructs the bank") {
    Rng rng(9);
    const PrototypeBank bank = bank_of({3, 1, 4, 5, 9, 2, 6}, 5, rng);
    const std::vector<int> drop{4, 9, 6};
    const PrototypeBank kept = eliminate_prototypes(bank, drop);
    Tensor rebuilt(bank.prototypes().shape());
    for (std::size_t r = 0; r < bank.num_classes(); ++r) {
      const int c = bank.class_ids()[r];
      const auto src = kept.contains(c) ? kept.prototype(c) : bank.prototype(c);
      std::copy(src.begin(), src.end(), rebuilt.row(r).begin());
    }
    CHECK(rebuilt.same_values(bank.prototypes()));
  }
}
