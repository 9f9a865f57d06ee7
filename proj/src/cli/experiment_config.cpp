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
#include "cli/experiment_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "numerics/error.hpp"

namespace ipl {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char *expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected " + expected +
                    ")");
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "a non-negative integer");
  return out;
}

std::size_t parse_size(std::string_view key, std::string_view v) { return static_cast<std::size_t>(parse_u64(key, v)); }

double parse_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "true or false");
}

std::vector<std::size_t> parse_dims(std::string_view key, std::string_view v) {
  std::vector<std::size_t> out;
  if (v.empty() || v == "none") return out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(parse_size(key, trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string dims_text(const std::vector<std::size_t> &dims) {
  if (dims.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) out += (i ? "," : "") + std::to_string(dims[i]);
  return out;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

struct Field {
  std::string key;
  std::function<void(ExperimentConfig &, std::string_view)> set;
  std::function<std::string(const ExperimentConfig &)> get;
};

#define IPL_SIZE_FIELD(name, member)                                                          \
  Field {                                                                                     \
    name, [](ExperimentConfig &c, std::string_view v) { c.member = parse_size(name, v); },    \
        [](const ExperimentConfig &c) { return std::to_string(c.member); }                    \
  }
#define IPL_REAL_FIELD(name, member)                                                          \
  Field {                                                                                     \
    name, [](ExperimentConfig &c, std::string_view v) { c.member = parse_real(name, v); },    \
        [](const ExperimentConfig &c) { return format_double(c.member); }                     \
  }
#define IPL_BOOL_FIELD(name, member)                                                          \
  Field {                                                                                     \
    name, [](ExperimentConfig &c, std::string_view v) { c.member = parse_bool(name, v); },    \
        [](const ExperimentConfig &c) { return bool_text(c.member); }                         \
  }

const std::vector<Field> &fields() {
  static const std::vector<Field> table = {
      Field{"seed", [](ExperimentConfig &c, std::string_view v) { c.seed = parse_u64("seed", v); },
            [](const ExperimentConfig &c) { return std::to_string(c.seed); }},
      IPL_SIZE_FIELD("trials", trials),
      Field{"out", [](ExperimentConfig &c, std::string_view v) { c.out = std::string(v); },
            [](const ExperimentConfig &c) { return c.out; }},

      Field{"data.source",
            [](ExperimentConfig &c, std::string_view v) {
              if (v != "generate" && v != "csv") bad_value("data.source", v, "generate or csv");
              c.data.source = std::string(v);
            },
            [](const ExperimentConfig &c) { return c.data.source; }},
      Field{"data.path", [](ExperimentConfig &c, std::string_view v) { c.data.path = std::string(v); },
            [](const ExperimentConfig &c) { return c.data.path; }},
      IPL_SIZE_FIELD("data.classes", data.classes),
      IPL_SIZE_FIELD("data.dim", data.dim),
      IPL_SIZE_FIELD("data.samples_per_class", data.samples_per_class),
      IPL_REAL_FIELD("data.separation", data.separation),
      IPL_REAL_FIELD("data.noise", data.noise),

      IPL_SIZE_FIELD("schedule.base_classes", schedule.base_classes),
      IPL_SIZE_FIELD("schedule.ways", schedule.ways),
      IPL_SIZE_FIELD("schedule.shots", schedule.shots),
      IPL_SIZE_FIELD("schedule.sessions", schedule.sessions),
      IPL_REAL_FIELD("schedule.test_fraction", schedule.test_fraction),

      Field{"model.hidden_dims",
            [](ExperimentConfig &c, std::string_view v) { c.model.hidden_dims = parse_dims("model.hidden_dims", v); },
            [](const ExperimentConfig &c) { return dims_text(c.model.hidden_dims); }},
      IPL_SIZE_FIELD("model.embed_dim", model.embed_dim),
      IPL_SIZE_FIELD("model.latent_dim", model.latent_dim),
      IPL_REAL_FIELD("model.scale_init", model.scale_init),
      IPL_BOOL_FIELD("model.scale_learnable", model.scale_learnable),

      IPL_SIZE_FIELD("train.epochs", train.epochs),
      IPL_SIZE_FIELD("train.batch_size", train.batch_size),
      IPL_REAL_FIELD("train.lr", train.lr),
      IPL_REAL_FIELD("train.weight_decay", train.weight_decay),
      IPL_BOOL_FIELD("train.ress", train.episodic_enabled),
      IPL_REAL_FIELD("train.episodic_fraction", train.episodic_fraction),
      IPL_REAL_FIELD("train.episodic_mix", train.episodic_mix),
      IPL_BOOL_FIELD("train.sppr", train.sppr_enabled),
      IPL_BOOL_FIELD("train.ft", train.ft_enabled),
      Field{"train.alt_mode",
            [](ExperimentConfig &c, std::string_view v) { c.train.alt_mode = parse_alt_mode(std::string(v)); },
            [](const ExperimentConfig &c) { return std::string(alt_mode_name(c.train.alt_mode)); }},
      IPL_SIZE_FIELD("train.ft_steps", train.ft_steps),
      IPL_REAL_FIELD("train.ft_lr", train.ft_lr),
      IPL_BOOL_FIELD("train.ft_backbone", train.ft_backbone),

      IPL_SIZE_FIELD("episode.n_way", train.episode.n_way),
      IPL_SIZE_FIELD("episode.k_shot", train.episode.k_shot),
      IPL_SIZE_FIELD("episode.query_batch", train.episode.query_batch),
      IPL_SIZE_FIELD("episode.updates", train.episode.updates_per_episode),

      Field{"refinement.mode",
            [](ExperimentConfig &c, std::string_view v) {
              try {
                c.train.refinement.mode = parse_refinement_mode(std::string(v));
              } catch (const Error &) {
                bad_value("refinement.mode", v, "raw or softmax");
              }
            },
            [](const ExperimentConfig &c) { return std::string(refinement_mode_name(c.train.refinement.mode)); }},
      IPL_REAL_FIELD("refinement.temperature", train.refinement.temperature),
      IPL_BOOL_FIELD("refinement.heads", train.refinement.use_projection_heads),
  };
  return table;
}

#undef IPL_SIZE_FIELD
#undef IPL_REAL_FIELD
#undef IPL_BOOL_FIELD

const Field &find_field(std::string_view key) {
  for (const auto &f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  find_field(trim(key)).set(*this, trim(value));
}

std::string ExperimentConfig::get(std::string_view key) const { return find_field(trim(key)).get(*this); }

const std::vector<std::string> &ExperimentConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto &f : fields()) out.push_back(f.key);
    return out;
  }();
  return names;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto &f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

void ExperimentConfig::validate() const {
  if (trials == 0) throw ConfigError("trials must be >= 1");
  if (data.source == "csv" && data.path.empty()) throw ConfigError("data.source=csv needs data.path");
  if (data.source == "generate") {
    if (data.classes == 0 || data.dim == 0 || data.samples_per_class == 0) {
      throw ConfigError("data.classes, data.dim and data.samples_per_class must be >= 1");
    }
    if (!(data.separation > 0.0) || !(data.noise > 0.0)) throw ConfigError("data.separation and data.noise must be > 0");
  }
  if (schedule.base_classes == 0 || schedule.shots == 0) {
    throw ConfigError("schedule.base_classes and schedule.shots must be >= 1");
  }
  if (schedule.sessions > 0 && schedule.ways == 0) throw ConfigError("schedule.ways must be >= 1");
  if (!(schedule.test_fraction > 0.0 && schedule.test_fraction < 1.0)) {
    throw ConfigError("schedule.test_fraction must lie in (0, 1)");
  }
  try {
    ModelConfig m = model;
    m.input_dim = std::max<std::size_t>(m.input_dim, 1);
    m.validate();
    train.validate();
  } catch (const ConfigError &) {
    throw;
  } catch (const Error &e) {
    throw ConfigError(e.what());
  }
}

void apply_config_text(ExperimentConfig &cfg, std::string_view text, const std::string &origin) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    try {
      cfg.set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError &e) {
      throw ConfigError(where + e.what());
    }
  }
}

void apply_config_file(ExperimentConfig &cfg, const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str(), path);
}

std::pair<std::string, std::string> split_assignment(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(text) + "'");
  return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

std::string config_to_text(const ExperimentConfig &cfg) {
  std::string out;
  for (const auto &[k, v] : cfg.entries()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace ipl
