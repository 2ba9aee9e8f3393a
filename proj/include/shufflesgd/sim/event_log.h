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
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shufflesgd/engine/block.h"
#include "shufflesgd/sim/network_stats.h"

namespace shufflesgd {

enum class JobKind : std::uint8_t { kForwardBackward, kParameterSync, kBench };

enum class EventType : std::uint8_t {
  kJobStart,
  kTaskStart,
  kBlockPut,
  kBlockGet,
  kTaskKilled,
  kTaskFailed,
  kTaskEnd,
  kBarrier,
};

std::string_view toString(JobKind kind);
std::string_view toString(EventType type);

// One record of the append-only event log. Field meaning by type:
//   block_put: payloadBytes = slice bytes, duplicate = idempotent re-put
//   block_get: payloadBytes = slice bytes, transferredBytes = remote bytes (0 if local)
//   task_end:  digest = hash of the weights the task trained on (fb jobs)
//   task_failed: detail = error message
//   barrier:   clockMs = virtual clock after the job
struct Event {
  std::uint64_t seq = 0;
  EventType type = EventType::kJobStart;
  std::uint64_t job = 0;
  JobKind kind = JobKind::kBench;
  std::int64_t iteration = 0;
  int task = -1;
  NodeId node = -1;
  int attempt = 0;
  std::optional<BlockId> block;
  std::uint64_t payloadBytes = 0;
  std::uint64_t transferredBytes = 0;
  bool duplicate = false;
  std::string digest;
  std::string detail;
  double clockMs = 0.0;
};

// Append-only log, written by the driver thread only. Tasks buffer their
// events and the driver appends them in task order at the job barrier, so
// the log is identical across thread interleavings.
class EventLog {
 public:
  void append(Event event);
  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  // One JSON object per line; schema in docs/event_log.md.
  void writeJsonLines(std::ostream& out) const;

 private:
  std::vector<Event> events_;
};

std::string toJsonLine(const Event& event);

// Returns a description of the first get whose block was not put by a job
// that had already crossed its barrier, or nullopt when the log is clean.
std::optional<std::string> findBarrierViolation(std::span<const Event> events);

}  // namespace shufflesgd
