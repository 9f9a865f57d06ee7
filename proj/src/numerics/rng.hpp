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

#ifndef IPL_NUMERICS_RNG_HPP_
#define IPL_NUMERICS_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ipl {

// xoshiro256** seeded through splitmix64. State transitions are pure 64-bit
// integer arithmetic, so a seed and call sequence produce the same stream on
// every platform.
//
//   uniform()       top 53 bits of next() scaled by 2^-53, in [0, 1)
//   below(n)        rejection sampling on next() mod n, unbiased
//   normal()        Box-Muller on two uniform() draws, no cached spare
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return position_; }

  std::uint64_t next();
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }
  template <typename T>
  void shuffle(std::vector<T> &items) {
    shuffle(std::span<T>(items));
  }

  // k distinct indices from [0, n), in selection order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t &state);

// Child seed for a named sub-stream, e.g. derive_seed(seed, "train", 0).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0);

}  // namespace ipl

#endif  // IPL_NUMERICS_RNG_HPP_
