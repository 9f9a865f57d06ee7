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

#include "pipeline/config.hpp"

#include <cmath>

#include "numerics/error.hpp"

namespace ipl {

const char *alt_mode_name(AltMode mode) {
  switch (mode) {
    case AltMode::kNone: return "none";
    case AltMode::kZero: return "zero";
    case AltMode::kRandom: return "random";
    case AltMode::kMean: return "mean";
  }
  return "none";
}

AltMode parse_alt_mode(const std::string &name) {
  if (name == "none") return AltMode::kNone;
  if (name == "zero") return AltMode::kZero;
  if (name == "random") return AltMode::kRandom;
  if (name == "mean") return AltMode::kMean;
  throw ConfigError("unknown update mode '" + name + "' (expected none, zero, random or mean)");
}

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be >= 1");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(lr >= 0.0) || !(ft_lr >= 0.0)) throw ConfigError("learning rates must be >= 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
  if (!(episodic_fraction >= 0.0 && episodic_fraction <= 1.0)) throw ConfigError("episodic_fraction must lie in [0, 1]");
  if (!(episodic_mix >= 0.0 && episodic_mix <= 1.0)) throw ConfigError("episodic_mix must lie in [0, 1]");
  if (alt_mode == AltMode::kNone && !sppr_enabled && !ft_enabled) {
    throw ConfigError("no prototype update selected: enable sppr, ft or an alternative update mode");
  }
  if (ft_enabled && ft_steps == 0) throw ConfigError("ft_steps must be >= 1 when fine-tuning");
  episode.validate();
  refinement.validate();
}

std::size_t TrainConfig::episodic_epochs() const {
  if (!episodic_enabled) return 0;
  return static_cast<std::size_t>(std::llround(static_cast<double>(epochs) * episodic_fraction));
}

}  // namespace ipl
