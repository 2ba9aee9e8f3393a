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

#include "shufflesgd/sim/event_log.h"

#include <map>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

namespace shufflesgd {

std::string_view toString(JobKind kind) {
  switch (kind) {
    case JobKind::kForwardBackward:
      return "forward_backward";
    case JobKind::kParameterSync:
      return "parameter_sync";
    case JobKind::kBench:
      return "bench";
  }
  return "?";
}

std::string_view toString(EventType type) {
  switch (type) {
    case EventType::kJobStart:
      return "job_start";
    case EventType::kTaskStart:
      return "task_start";
    case EventType::kBlockPut:
      return "block_put";
    case EventType::kBlockGet:
      return "block_get";
    case EventType::kTaskKilled:
      return "task_killed";
    case EventType::kTaskFailed:
      return "task_failed";
    case EventType::kTaskEnd:
      return "task_end";
    case EventType::kBarrier:
      return "barrier";
  }
  return "?";
}

void EventLog::append(Event event) {
  event.seq = events_.size();
  events_.push_back(std::move(event));
}

std::string toJsonLine(const Event& e) {
  nlohmann::ordered_json j;
  j["seq"] = e.seq;
  j["event"] = toString(e.type);
  j["job"] = e.job;
  j["kind"] = toString(e.kind);
  j["iteration"] = e.iteration;
  if (e.task >= 0) {
    j["task"] = e.task;
    j["node"] = e.node;
    j["attempt"] = e.attempt;
  }
  if (e.block) {
    j["block"] = {{"kind", toString(e.block->kind)},
                  {"iteration", e.block->iteration},
                  {"source", e.block->sourceTask},
                  {"slice", e.block->sliceIndex}};
    j["bytes"] = e.payloadBytes;
  }
  if (e.type == EventType::kBlockGet) j["transferred"] = e.transferredBytes;
  if (e.type == EventType::kBlockPut) j["duplicate"] = e.duplicate;
  if (!e.digest.empty()) j["digest"] = e.digest;
  if (!e.detail.empty()) j["detail"] = e.detail;
  if (e.type == EventType::kBarrier) j["clock_ms"] = e.clockMs;
  return j.dump();
}

void EventLog::writeJsonLines(std::ostream& out) const {
  for (const Event& e : events_) out << toJsonLine(e) << '\n';
}

std::optional<std::string> findBarrierViolation(std::span<const Event> events) {
  std::set<std::uint64_t> barriered;
  std::map<BlockId, std::uint64_t> putJob;
  for (const Event& e : events) {
    switch (e.type) {
      case EventType::kBarrier:
        barriered.insert(e.job);
        break;
      case EventType::kBlockPut:
        if (e.block) putJob.try_emplace(*e.block, e.job);
        break;
      case EventType::kBlockGet: {
        if (!e.block) break;
        auto it = putJob.find(*e.block);
        if (it == putJob.end()) {
          return fmt::format("event {}: get of {} which was never put", e.seq, e.block->str());
        }
        if (!barriered.contains(it->second)) {
          return fmt::format("event {}: get of {} put by job {} before its barrier", e.seq,
                             e.block->str(), it->second);
        }
        break;
      }
      default:
        break;
    }
  }
  return std::nullopt;
}

}  // namespace shufflesgd
