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

#include "model/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "numerics/error.hpp"

namespace ipl {

namespace {

constexpr char kMagic[] = "IPLCKPT1";
constexpr std::size_t kMagicLen = 8;

void put_u32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string &out, double d) {
  auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(const std::string &bytes) : bytes_(bytes) {}

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw FormatError("checkpoint truncated at byte " + std::to_string(pos_));
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string &bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const NamedTensors &tensors) {
  std::string out(kMagic, kMagicLen);
  put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto &[name, t] : tensors) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : t.data()) put_f64(out, v);
  }
  return out;
}

NamedTensors decode_checkpoint(const std::string &bytes) {
  Reader r(bytes);
  if (r.str(kMagicLen) != std::string(kMagic, kMagicLen)) throw FormatError("not a checkpoint (bad magic)");
  const std::uint32_t count = r.u32();
  NamedTensors out;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str(r.u32());
    const std::uint32_t rank = r.u32();
    Shape shape;
    for (std::uint32_t k = 0; k < rank; ++k) shape.push_back(r.u32());
    const std::size_t n = shape_numel(shape);
    r.need(n * 8);
    std::vector<double> data(n);
    for (auto &v : data) v = r.f64();
    out.emplace_back(std::move(name), Tensor(std::move(shape), std::move(data)));
  }
  if (!r.done()) throw FormatError("trailing bytes after checkpoint payload");
  return out;
}

void save_checkpoint(const std::string &path, const NamedTensors &tensors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  const std::string bytes = encode_checkpoint(tensors);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path);
}

NamedTensors load_checkpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

NamedTensors model_to_tensors(const Model &model) {
  NamedTensors out;
  for (std::size_t i = 0; i < model.backbone.layers.size(); ++i) {
    out.emplace_back("backbone." + std::to_string(i) + ".weight", model.backbone.layers[i].weight);
    out.emplace_back("backbone." + std::to_string(i) + ".bias", model.backbone.layers[i].bias);
  }
  out.emplace_back("bank.prototypes", model.bank.prototypes());
  std::vector<double> ids(model.bank.class_ids().begin(), model.bank.class_ids().end());
  out.emplace_back("bank.class_ids", Tensor::vector(std::move(ids)));
  out.emplace_back("bank.scale", model.bank.scale());
  out.emplace_back("bank.scale_learnable", Tensor::vector({model.bank.scale().requires_grad() ? 1.0 : 0.0}));
  out.emplace_back("heads.s.weight", model.heads.head_s.weight);
  out.emplace_back("heads.s.bias", model.heads.head_s.bias);
  out.emplace_back("heads.p.weight", model.heads.head_p.weight);
  out.emplace_back("heads.p.bias", model.heads.head_p.bias);
  for (auto &[_, t] : out) {
    t.clear_grad();
    t.set_requires_grad(false);
  }
  return out;
}

Model model_from_tensors(const NamedTensors &tensors) {
  std::map<std::string, Tensor> by_name;
  for (const auto &[name, t] : tensors) {
    if (!by_name.emplace(name, t).second) throw FormatError("duplicate tensor '" + name + "' in checkpoint");
  }
  auto take = [&](const std::string &name) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError("checkpoint lacks tensor '" + name + "'");
    Tensor t = it->second;
    t.set_requires_grad(true);
    return t;
  };
  Model m;
  for (std::size_t i = 0; by_name.count("backbone." + std::to_string(i) + ".weight"); ++i) {
    m.backbone.layers.push_back(
        {take("backbone." + std::to_string(i) + ".weight"), take("backbone." + std::to_string(i) + ".bias")});
  }
  m.backbone.validate();
  std::vector<int> ids;
  const Tensor id_values = take("bank.class_ids");
  for (double v : id_values.data()) ids.push_back(static_cast<int>(v));
  Tensor scale = take("bank.scale");
  scale.set_requires_grad(take("bank.scale_learnable").item() != 0.0);
  m.bank = PrototypeBank(take("bank.prototypes"), std::move(ids), std::move(scale));
  m.heads.head_s = {take("heads.s.weight"), take("heads.s.bias")};
  m.heads.head_p = {take("heads.p.weight"), take("heads.p.bias")};
  return m;
}

}  // namespace ipl
