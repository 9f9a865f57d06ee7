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

#include "data/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "numerics/error.hpp"

namespace ipl {

const std::vector<int> &SessionSchedule::classes_of(std::size_t session) const {
  if (session == 0 || session > session_count()) throw IndexError("session " + std::to_string(session) + " out of range");
  return session == 1 ? base_classes : increments[session - 2].classes;
}

std::vector<int> SessionSchedule::classes_through(std::size_t session) const {
  std::vector<int> out;
  for (std::size_t s = 1; s <= session; ++s) {
    const auto &c = classes_of(s);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

Dataset SessionSchedule::cumulative_test(std::size_t session) const {
  classes_of(session);
  Dataset out = base_test;
  for (std::size_t s = 2; s <= session; ++s) out = Dataset::concat(out, increments[s - 2].test);
  return out;
}

namespace {

void require_classes(const Dataset &d, const std::vector<int> &classes, const char *what) {
  std::vector<int> want(classes);
  std::sort(want.begin(), want.end());
  if (d.classes() != want) throw DataError(std::string(what) + " does not cover exactly its session's classes");
}

}  // namespace

void SessionSchedule::validate() const {
  std::set<int> seen;
  for (std::size_t s = 1; s <= session_count(); ++s) {
    for (int c : classes_of(s)) {
      if (!seen.insert(c).second) throw DataError("class " + std::to_string(c) + " appears in more than one session");
    }
  }
  if (base_classes.empty()) throw DataError("schedule has no base classes");
  require_classes(base_train, base_classes, "base train set");
  require_classes(base_test, base_classes, "base test set");
  for (const auto &inc : increments) {
    if (inc.classes.empty()) throw DataError("incremental session with no classes");
    require_classes(inc.train, inc.classes, "incremental train set");
    require_classes(inc.test, inc.classes, "incremental test set");
    for (int c : inc.classes) {
      if (inc.train.indices_of(c).size() != shots) {
        throw DataError("incremental class " + std::to_string(c) + " has " +
                        std::to_string(inc.train.indices_of(c).size()) + " shots, expected " + std::to_string(shots));
      }
    }
  }
}

namespace {

Dataset draw_shots(const Dataset &pool, const std::vector<int> &classes, std::size_t shots, Rng &rng) {
  std::vector<std::size_t> rows;
  for (int c : classes) {
    const auto &idx = pool.indices_of(c);
    if (idx.size() < shots) {
      throw DataError("class " + std::to_string(c) + " has " + std::to_string(idx.size()) + " train samples, needs " +
                      std::to_string(shots));
    }
    for (auto pick : rng.sample_without_replacement(idx.size(), shots)) rows.push_back(idx[pick]);
  }
  return pool.subset(rows);
}

}  // namespace

SessionSchedule build_schedule(const Dataset &data, const ScheduleConfig &cfg, Rng &rng) {
  if (cfg.base_classes == 0) throw DataError("base session needs at least one class");
  if (cfg.sessions > 0 && cfg.ways == 0) throw DataError("incremental sessions need ways >= 1");
  if (cfg.sessions > 0 && cfg.shots == 0) throw DataError("incremental sessions need shots >= 1");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) throw DataError("test_fraction must lie in (0, 1)");
  std::vector<int> classes = data.classes();
  const std::size_t needed = cfg.base_classes + cfg.ways * cfg.sessions;
  if (needed > classes.size()) {
    throw DataError("schedule needs " + std::to_string(needed) + " classes, dataset has " + std::to_string(classes.size()));
  }
  rng.shuffle(classes);

  // Per-class split, visited in ascending class id so the stream does not
  // depend on the shuffle above.
  std::map<int, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> split;
  for (const auto &[c, idx] : data.class_index()) {
    std::vector<std::size_t> rows(idx);
    rng.shuffle(rows);
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(rows.size()) * cfg.test_fraction));
    if (n_test == 0 || n_test >= rows.size()) {
      throw DataError("class " + std::to_string(c) + " with " + std::to_string(rows.size()) +
                      " samples cannot be split at test_fraction " + std::to_string(cfg.test_fraction));
    }
    std::vector<std::size_t> test(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train(rows.begin() + static_cast<std::ptrdiff_t>(n_test), rows.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    split[c] = {std::move(train), std::move(test)};
  }
  auto rows_for = [&](const std::vector<int> &cls, bool test) {
    std::vector<std::size_t> rows;
    for (int c : cls) {
      const auto &r = test ? split[c].second : split[c].first;
      rows.insert(rows.end(), r.begin(), r.end());
    }
    return data.subset(rows);
  };

  SessionSchedule s;
  s.shots = cfg.shots;
  s.base_classes.assign(classes.begin(), classes.begin() + static_cast<std::ptrdiff_t>(cfg.base_classes));
  s.base_train = rows_for(s.base_classes, false);
  s.base_test = rows_for(s.base_classes, true);
  for (std::size_t i = 0; i < cfg.sessions; ++i) {
    Increment inc;
    auto first = classes.begin() + static_cast<std::ptrdiff_t>(cfg.base_classes + i * cfg.ways);
    inc.classes.assign(first, first + static_cast<std::ptrdiff_t>(cfg.ways));
    inc.pool = rows_for(inc.classes, false);
    inc.test = rows_for(inc.classes, true);
    s.increments.push_back(std::move(inc));
  }
  for (auto &inc : s.increments) inc.train = draw_shots(inc.pool, inc.classes, cfg.shots, rng);
  s.validate();
  return s;
}

SessionSchedule resample_shots(const SessionSchedule &schedule, Rng &rng) {
  SessionSchedule out = schedule;
  for (auto &inc : out.increments) inc.train = draw_shots(inc.pool, inc.classes, schedule.shots, rng);
  return out;
}

}  // namespace ipl
