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

#include "shufflesgd/sim/schedule.h"

#include <map>
#include <numeric>

#include <fmt/format.h>

namespace shufflesgd {

std::vector<ScheduleRow> runScheduleSweep(const SweepParams& params) {
  if (params.taskCounts.empty() || params.groupSizes.empty()) {
    throw InvalidArgument("schedule sweep needs task counts and group sizes");
  }
  if (params.computeTime.count() <= 0) throw InvalidArgument("computeTime must be positive");
  int iterations = params.iterations;
  if (iterations == 0) {
    iterations = 1;
    for (int g : params.groupSizes) {
      if (g < 1) throw InvalidArgument("group sizes must be positive");
      iterations = std::lcm(iterations, g);
    }
  }
  if (iterations < 1) throw InvalidArgument("iterations must be positive");

  std::vector<ScheduleRow> rows;
  for (int g : params.groupSizes) {
    for (int count : params.taskCounts) {
      if (count < 1) throw InvalidArgument("task counts must be positive");
      ClusterConfig config;
      config.numNodes = params.numNodes;
      config.scheduleCost = params.scheduleCost;
      config.groupSize = g;
      Cluster cluster(config);

      ScheduleRow row;
      row.taskCount = count;
      row.groupSize = g;
      row.scheduleCost = params.scheduleCost;
      std::uint64_t events = 0;
      for (int it = 0; it < iterations; ++it) {
        JobSpec job{JobKind::kBench, it, {}};
        job.tasks.reserve(count);
        for (int t = 0; t < count; ++t) {
          job.tasks.push_back(
              TaskSpec{t % params.numNodes, 0, [](TaskContext&) {}, params.computeTime});
        }
        JobResult r = cluster.submitJob(std::move(job));
        row.overhead += r.schedulingOverhead;
        row.compute += r.maxTaskDuration;
        row.makespan += r.makespan;
        events += r.schedulingEvents;
      }
      row.overhead /= iterations;
      row.compute /= iterations;
      row.makespan /= iterations;
      row.eventsPerIteration = static_cast<double>(events) / iterations;
      row.overheadFraction = row.overhead / row.compute;
      rows.push_back(row);
    }
  }
  return rows;
}

std::optional<std::string> findMonotonicityViolation(const std::vector<ScheduleRow>& rows) {
  std::map<int, std::map<int, double>> byG;      // G -> count -> fraction
  std::map<int, std::map<int, double>> byCount;  // count -> G -> fraction
  bool strict = false;
  for (const ScheduleRow& r : rows) {
    byG[r.groupSize][r.taskCount] = r.overheadFraction;
    byCount[r.taskCount][r.groupSize] = r.overheadFraction;
    strict = strict || r.scheduleCost.count() > 0;
  }
  auto bad = [strict](double prev, double next, bool increasing) {
    if (increasing) return strict ? !(next > prev) : next < prev;
    return strict ? !(next < prev) : next > prev;
  };
  for (const auto& [g, curve] : byG) {
    const std::pair<const int, double>* prev = nullptr;
    for (const auto& point : curve) {
      if (prev && bad(prev->second, point.second, true)) {
        return fmt::format("G={}: overhead {} at {} tasks is not above {} at {} tasks", g,
                           point.second, point.first, prev->second, prev->first);
      }
      prev = &point;
    }
  }
  for (const auto& [count, curve] : byCount) {
    const std::pair<const int, double>* prev = nullptr;
    for (const auto& point : curve) {
      if (prev && bad(prev->second, point.second, false)) {
        return fmt::format("{} tasks: overhead {} at G={} is not below {} at G={}", count,
                           point.second, point.first, prev->second, prev->first);
      }
      prev = &point;
    }
  }
  return std::nullopt;
}

}  // namespace shufflesgd
