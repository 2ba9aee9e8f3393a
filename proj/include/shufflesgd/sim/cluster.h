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

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shufflesgd/common/errors.h"
#include "shufflesgd/engine/block_store.h"
#include "shufflesgd/sim/event_log.h"
#include "shufflesgd/sim/network_stats.h"

namespace boost::asio {
class thread_pool;
}

namespace shufflesgd {

// Virtual time. Reports are computed from the cost model, never from the
// wall clock, so they are reproducible.
using SimDuration = std::chrono::duration<double, std::milli>;

enum class KillMode : std::uint8_t {
  // Killed at the task's first store operation, before any effect.
  kKillBeforeEffects,
  // Killed just before its last planned put: all reads and a strict prefix
  // of plannedPuts - 1 puts have happened.
  kKillAfterPartialPut,
};

std::string_view toString(KillMode mode);

struct FaultSpec {
  std::int64_t iteration = 0;
  JobKind jobKind = JobKind::kForwardBackward;
  int taskId = 0;
  KillMode mode = KillMode::kKillBeforeEffects;

  auto operator<=>(const FaultSpec&) const = default;
};

struct CostModel {
  SimDuration perRemoteByte{0};
  SimDuration perUpdatedElement{0};
};

struct ClusterConfig {
  int numNodes = 1;
  int threadsPerNode = 1;
  SimDuration scheduleCost{0};  // per-task dispatch cost on the driver
  int groupSize = 1;            // iterations scheduled per scheduling action
  std::vector<FaultSpec> faultPlan;
  CostModel cost;
};

// Thrown inside a task attempt by fault injection.
class TaskKilled : public Error {
 public:
  using Error::Error;
};

// The only handle a task body has on the outside world. Store traffic goes
// through here so it is logged, charged to virtual time and subject to fault
// injection.
class TaskContext {
 public:
  struct Info {
    int task = 0;
    NodeId node = 0;
    JobKind kind = JobKind::kBench;
    std::int64_t iteration = 0;
    std::uint64_t job = 0;
    int attempt = 0;
    int plannedPuts = 0;
  };

  TaskContext(BlockStore& store, const CostModel& cost, Info info,
              std::optional<KillMode> kill = std::nullopt);

  int taskId() const { return info_.task; }
  NodeId node() const { return info_.node; }
  std::int64_t iteration() const { return info_.iteration; }
  JobKind kind() const { return info_.kind; }
  int attempt() const { return info_.attempt; }

  void put(const BlockId& id, Blob blob);
  Blob get(const BlockId& id);

  void chargeCompute(SimDuration d) { compute_ += d; }
  void chargeUpdate(std::size_t elements);
  void setDigest(std::string digest) { digest_ = std::move(digest); }

  SimDuration computeTime() const { return compute_; }
  SimDuration networkTime() const { return network_; }
  std::uint64_t remoteBytes() const { return remoteBytes_; }
  const std::string& digest() const { return digest_; }
  std::vector<Event> takeEvents() { return std::move(events_); }
  // A kill that never found a trigger point fires when the body returns.
  bool killPending() const { return kill_.has_value(); }

 private:
  void maybeKill(bool isPut);
  Event makeEvent(EventType type) const;

  BlockStore& store_;
  const CostModel& cost_;
  Info info_;
  std::optional<KillMode> kill_;
  int putsDone_ = 0;
  SimDuration compute_{0};
  SimDuration network_{0};
  std::uint64_t remoteBytes_ = 0;
  std::string digest_;
  std::vector<Event> events_;
};

struct TaskSpec {
  NodeId node = 0;
  int plannedPuts = 0;
  std::function<void(TaskContext&)> body;
  // When set, replaces the cost-model duration (bench-sched mode).
  std::optional<SimDuration> fixedDuration;
};

struct JobSpec {
  JobKind kind = JobKind::kBench;
  std::int64_t iteration = 0;
  std::vector<TaskSpec> tasks;  // task id = index
};

struct TaskResult {
  int attempts = 0;
  SimDuration duration{0};  // all attempts
  SimDuration compute{0};   // successful attempt
  SimDuration network{0};   // successful attempt
  std::uint64_t remoteBytes = 0;
  std::string digest;
  std::chrono::nanoseconds wallTime{0};  // informational only
};

struct JobResult {
  std::uint64_t job = 0;
  JobKind kind = JobKind::kBench;
  std::int64_t iteration = 0;
  std::vector<TaskResult> tasks;
  SimDuration schedulingOverhead{0};
  SimDuration maxTaskDuration{0};
  SimDuration makespan{0};
  std::uint64_t schedulingEvents = 0;
  SimDuration start{0};
  SimDuration end{0};

  int retries() const;
};

// Simulated cluster: one thread pool per node, a driver-side scheduler with
// per-task dispatch cost and optional group scheduling, the shared block
// store, network accounting, the event log and a virtual clock.
//
// Drive it from a single control thread. submitJob() returns only after every
// task has finished (the job barrier). A task that throws is re-run once; a
// second failure aborts the job by rethrowing the error of the lowest failing
// task id.
//
// Group scheduling: a job at iteration i with G = groupSize dispatches its
// tasks for iterations i..i+G-1 in one action, so scheduling events are
// counted only when i % G == 0, while the virtual clock charges the amortized
// N_tasks * cost / G to every job.
class Cluster {
 public:
  explicit Cluster(ClusterConfig config);
  ~Cluster();

  Cluster(const Cluster&) = delete;
  Cluster& operator=(const Cluster&) = delete;

  JobResult submitJob(JobSpec job);

  const ClusterConfig& config() const { return config_; }
  int numNodes() const { return config_.numNodes; }
  SimDuration now() const { return clock_; }
  BlockStore& store() { return store_; }
  const BlockStore& store() const { return store_; }
  NetworkStats& network() { return network_; }
  const NetworkStats& network() const { return network_; }
  EventLog& events() { return events_; }
  const EventLog& events() const { return events_; }

 private:
  std::optional<KillMode> faultFor(JobKind kind, std::int64_t iteration, int task) const;

  ClusterConfig config_;
  NetworkStats network_;
  BlockStore store_;
  EventLog events_;
  std::vector<std::unique_ptr<boost::asio::thread_pool>> pools_;
  SimDuration clock_{0};
  std::uint64_t nextJob_ = 0;
};

}  // namespace shufflesgd
