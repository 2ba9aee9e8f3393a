// Copyright 2026 The shufflesgd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shufflesgd/sim/cluster.h"

namespace shufflesgd {

struct SweepParams {
  std::vector<int> taskCounts;
  std::vector<int> groupSizes;
  SimDuration scheduleCost{0};
  SimDuration computeTime{0};  // fixed duration of every task
  int numNodes = 16;
  // 0 selects the lcm of groupSizes so every G sees whole groups.
  int iterations = 0;
};

// One row per (taskCount, groupSize), averaged over the simulated iterations.
struct ScheduleRow {
  int taskCount = 0;
  int groupSize = 1;
  SimDuration scheduleCost{0};
  SimDuration compute{0};   // max task duration per job
  SimDuration overhead{0};  // taskCount * scheduleCost / groupSize per job
  double overheadFraction = 0.0;
  double eventsPerIteration = 0.0;
  SimDuration makespan{0};  // per job
};

// Runs one single-job-per-iteration cluster per (taskCount, G) cell with
// oversubscribed nodes and fixed task durations. Rows are ordered by G, then
// task count, both ascending.
std::vector<ScheduleRow> runScheduleSweep(const SweepParams& params);

// Returns the first violation of "overhead increases with task count at fixed G"
// or "overhead decreases with G at fixed task count", if any. Non-strict when
// the schedule cost is zero.
std::optional<std::string> findMonotonicityViolation(const std::vector<ScheduleRow>& rows);

}  // namespace shufflesgd
