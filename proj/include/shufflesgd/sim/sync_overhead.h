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

#include <cstdint>
#include <vector>

#include "shufflesgd/sim/cluster.h"

namespace shufflesgd {

struct IterationStats {
  std::int64_t iteration = 0;
  // Virtual compute charged by each forward-backward task, indexed by task.
  std::vector<SimDuration> perTaskComputeTime;
  // Sync job makespan plus the slowest weight fetch of the same iteration's
  // forward-backward job (the broadcast leg of the previous update).
  SimDuration syncTime{0};
  std::uint64_t schedulingEvents = 0;  // both jobs of the iteration
  double lossMean = 0.0;               // mean over tasks of the batch loss
  SimDuration forwardBackwardMakespan{0};
  SimDuration syncMakespan{0};
  std::uint64_t shuffleBytes = 0;    // total over nodes, outbound
  std::uint64_t broadcastBytes = 0;  // total over nodes, outbound
  int retries = 0;
  std::chrono::nanoseconds wallTime{0};  // informational only
};

struct SyncOverhead {
  std::vector<double> perIteration;  // syncTime / mean(perTaskComputeTime)
  double mean = 0.0;
};

// Throws InvalidArgument on empty stats or an iteration with zero compute.
SyncOverhead measureSyncOverhead(const std::vector<IterationStats>& stats);

}  // namespace shufflesgd
