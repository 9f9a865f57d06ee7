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
#ifndef IPL_CLI_EXPERIMENT_CONFIG_HPP_
#define IPL_CLI_EXPERIMENT_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "data/schedule.hpp"
#include "model/model.hpp"
#include "pipeline/config.hpp"

namespace ipl {

struct DataConfig {
  std::string source = "generate";  // generate | csv
  std::string path;                 // csv only
  std::size_t classes = 20;
  std::size_t dim = 32;
  std::size_t samples_per_class = 70;
  double separation = 4.0;
  double noise = 1.0;
};

// Everything one experiment needs. Keys are flat and dotted, e.g.
// "train.epochs" or "refinement.mode"; see ExperimentConfig::keys().
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t trials = 5;
  std::string out = ".";
  DataConfig data;
  ScheduleConfig schedule;
  ModelConfig model;  // input_dim follows the loaded data
  TrainConfig train;

  // ConfigError on an unknown key or an unparsable value.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  static const std::vector<std::string> &keys();
  std::vector<std::pair<std::string, std::string>> entries() const;

  // Range checks that do not need the data.
  void validate() const;
};

// Applies `key = value` lines; '#' starts a comment, blank lines are skipped.
// `origin` prefixes error messages (usually the file path).
void apply_config_text(ExperimentConfig &cfg, std::string_view text, const std::string &origin);
void apply_config_file(ExperimentConfig &cfg, const std::string &path);

// Splits "key=value" as given to --set.
std::pair<std::string, std::string> split_assignment(std::string_view text);

std::string config_to_text(const ExperimentConfig &cfg);

// Shortest decimal that parses back to the same double.
std::string format_double(double value);

}  // namespace ipl

#endif  // IPL_CLI_EXPERIMENT_CONFIG_HPP_
