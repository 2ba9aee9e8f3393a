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

#include "shufflesgd/sim/sync_overhead.h"

#include <fmt/format.h>

namespace shufflesgd {

SyncOverhead measureSyncOverhead(const std::vector<IterationStats>& stats) {
  if (stats.empty()) throw InvalidArgument("measureSyncOverhead: no iteration stats");
  SyncOverhead out;
  double total = 0.0;
  for (const IterationStats& s : stats) {
    if (s.perTaskComputeTime.empty()) {
      throw InvalidArgument(fmt::format("iteration {}: no task compute times", s.iteration));
    }
    double sum = 0.0;
    for (SimDuration d : s.perTaskComputeTime) sum += d.count();
    double mean = sum / static_cast<double>(s.perTaskComputeTime.size());
    if (mean <= 0.0) {
      throw InvalidArgument(fmt::format("iteration {}: zero compute time", s.iteration));
    }
    out.perIteration.push_back(s.syncTime.count() / mean);
    total += out.perIteration.back();
  }
  out.mean = total / static_cast<double>(out.perIteration.size());
  return out;
}

}  // namespace shufflesgd
