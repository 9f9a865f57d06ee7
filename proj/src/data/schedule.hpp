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

#ifndef IPL_DATA_SCHEDULE_HPP_
#define IPL_DATA_SCHEDULE_HPP_

#include <cstddef>
#include <vector>

#include "data/dataset.hpp"
#include "numerics/rng.hpp"

namespace ipl {

struct ScheduleConfig {
  std::size_t base_classes = 12;
  std::size_t ways = 2;
  std::size_t shots = 5;
  std::size_t sessions = 4;  // incremental sessions after the base one
  double test_fraction = 20.0 / 70.0;
};

struct Increment {
  std::vector<int> classes;
  Dataset train;  // exactly shots samples per class
  Dataset test;
  Dataset pool;   // the full train split the shots were drawn from
};

// Session 1 is the base session; session i >= 2 is increments[i - 2].
struct SessionSchedule {
  std::vector<int> base_classes;
  Dataset base_train;
  Dataset base_test;
  std::vector<Increment> increments;
  std::size_t shots = 0;

  std::size_t session_count() const { return 1 + increments.size(); }
  const std::vector<int> &classes_of(std::size_t session) const;
  // Y^1 u ... u Y^session, in session order.
  std::vector<int> classes_through(std::size_t session) const;
  Dataset cumulative_test(std::size_t session) const;

  // Throws DataError on overlapping label sets, wrong shot counts, or test
  // sets that do not match their session's classes.
  void validate() const;
};

// Shuffles class ids, assigns the first base_classes to session 1 and then
// consecutive blocks of ways. Every class is split into train/test with
// round(n * test_fraction) test rows; incremental train sets keep a seeded
// draw of exactly shots rows.
SessionSchedule build_schedule(const Dataset &data, const ScheduleConfig &cfg, Rng &rng);

// Same schedule with a fresh draw of the incremental shots from each pool.
SessionSchedule resample_shots(const SessionSchedule &schedule, Rng &rng);

}  // namespace ipl

#endif  // IPL_DATA_SCHEDULE_HPP_
