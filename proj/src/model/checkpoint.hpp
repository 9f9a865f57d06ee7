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

#ifndef IPL_MODEL_CHECKPOINT_HPP_
#define IPL_MODEL_CHECKPOINT_HPP_

#include <string>
#include <utility>
#include <vector>

#include "model/model.hpp"

namespace ipl {

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

// Binary layout, all integers little-endian:
//   "IPLCKPT1"                      8 bytes
//   u32 tensor count
//   per tensor:
//     u32 name length, name bytes (no terminator)
//     u32 rank, rank x u32 dims
//     product(dims) x f64 (IEEE-754 bits, little-endian)
std::string encode_checkpoint(const NamedTensors &tensors);
NamedTensors decode_checkpoint(const std::string &bytes);

void save_checkpoint(const std::string &path, const NamedTensors &tensors);
NamedTensors load_checkpoint(const std::string &path);

// Names: backbone.<i>.weight/bias, bank.prototypes, bank.class_ids,
// bank.scale, bank.scale_learnable, heads.s.weight/bias, heads.p.weight/bias.
NamedTensors model_to_tensors(const Model &model);
Model model_from_tensors(const NamedTensors &tensors);

}  // namespace ipl

#endif  // IPL_MODEL_CHECKPOINT_HPP_
