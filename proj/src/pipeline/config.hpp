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

#ifndef IPL_PIPELINE_CONFIG_HPP_
#define IPL_PIPELINE_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

#include "episodes/episodes.hpp"
#include "sppr/sppr.hpp"

namespace ipl {

// Prototype update used by the initialization baselines instead of
// refinement: zero vectors, a fresh random draw, or the class means.
enum class AltMode { kNone, kZero, kRandom, kMean };

const char *alt_mode_name(AltMode mode);
AltMode parse_alt_mode(const std::string &name);

struct TrainConfig {
  std::size_t epochs = 70;
  std::size_t batch_size = 128;
  double lr = 0.02;
  double weight_decay = 0.0005;
  std::uint64_t seed = 0;

  EpisodeConfig episode;
  RefinementConfig refinement;

  bool episodic_enabled = true;
  // Share of epochs spent on episodes after the standard phase.
  double episodic_fraction = 0.5;
  // Probability that an iteration of the episodic phase is an episode rather
  // than a standard mini-batch.
  double episodic_mix = 1.0;

  bool sppr_enabled = true;
  bool ft_enabled = false;
  AltMode alt_mode = AltMode::kNone;
  std::size_t ft_steps = 50;
  double ft_lr = 0.01;
  bool ft_backbone = false;

  void validate() const;

  std::size_t episodic_epochs() const;
  std::size_t standard_epochs() const { return epochs - episodic_epochs(); }
};

}  // namespace ipl

#endif  // IPL_PIPELINE_CONFIG_HPP_
