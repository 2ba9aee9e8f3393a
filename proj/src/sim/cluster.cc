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

#include "shufflesgd/sim/cluster.h"

#include <algorithm>
#include <latch>

#include <boost/asio/post.hpp>
#include <boost/asio/thread_pool.hpp>
#include <fmt/format.h>

namespace shufflesgd {

namespace {

std::string describe(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown error";
  }
}

}  // namespace

std::string_view toString(KillMode mode) {
  return mode == KillMode::kKillBeforeEffects ? "kill_before_effects" : "kill_after_partial_put";
}

TaskContext::TaskContext(BlockStore& store, const CostModel& cost, Info info,
                         std::optional<KillMode> kill)
    : store_(store), cost_(cost), info_(info), kill_(kill) {}

Event TaskContext::makeEvent(EventType type) const {
  Event e;
  e.type = type;
  e.job = info_.job;
  e.kind = info_.kind;
  e.iteration = info_.iteration;
  e.task = info_.task;
  e.node = info_.node;
  e.attempt = info_.attempt;
  return e;
}

void TaskContext::maybeKill(bool isPut) {
  if (!kill_) return;
  bool fire = *kill_ == KillMode::kKillBeforeEffects ||
              (isPut && putsDone_ >= std::max(info_.plannedPuts - 1, 0));
  if (!fire) return;
  KillMode mode = *kill_;
  kill_.reset();
  throw TaskKilled(fmt::format("task {} of {} job {} killed ({}) after {} puts", info_.task,
                               toString(info_.kind), info_.job, toString(mode), putsDone_));
}

void TaskContext::put(const BlockId& id, Blob blob) {
  maybeKill(true);
  std::uint64_t bytes = blob.payloadBytes();
  auto outcome = store_.put(id, std::move(blob), info_.node);
  ++putsDone_;
  Event e = makeEvent(EventType::kBlockPut);
  e.block = id;
  e.payloadBytes = bytes;
  e.duplicate = outcome == BlockStore::PutOutcome::kDuplicate;
  events_.push_back(std::move(e));
}

Blob TaskContext::get(const BlockId& id) {
  maybeKill(false);
  BlockStore::Read read = store_.get(id, info_.node);
  remoteBytes_ += read.remoteBytes;
  network_ += cost_.perRemoteByte * static_cast<double>(read.remoteBytes);
  Event e = makeEvent(EventType::kBlockGet);
  e.block = id;
  e.payloadBytes = read.blob.payloadBytes();
  e.transferredBytes = read.remoteBytes;
  events_.push_back(std::move(e));
  return read.blob;
}

void TaskContext::chargeUpdate(std::size_t elements) {
  compute_ += cost_.perUpdatedElement * static_cast<double>(elements);
}

int JobResult::retries() const {
  int n = 0;
  for (const auto& t : tasks) n += t.attempts - 1;
  return n;
}

Cluster::Cluster(ClusterConfig config)
    : config_(std::move(config)), network_(config_.numNodes), store_(&network_) {
  if (config_.threadsPerNode < 1) throw InvalidArgument("threadsPerNode must be positive");
  if (config_.groupSize < 1) throw InvalidArgument("groupSize must be positive");
  if (config_.scheduleCost.count() < 0) throw InvalidArgument("scheduleCost must be >= 0");
  for (int n = 0; n < config_.numNodes; ++n) {
    pools_.push_back(std::make_unique<boost::asio::thread_pool>(config_.threadsPerNode));
  }
}

Cluster::~Cluster() {
  for (auto& pool : pools_) pool->join();
}

std::optional<KillMode> Cluster::faultFor(JobKind kind, std::int64_t iteration, int task) const {
  for (const FaultSpec& f : config_.faultPlan) {
    if (f.jobKind == kind && f.iteration == iteration && f.taskId == task) return f.mode;
  }
  return std::nullopt;
}

JobResult Cluster::submitJob(JobSpec job) {
  for (const TaskSpec& t : job.tasks) {
    if (t.node < 0 || t.node >= config_.numNodes) {
      throw InvalidArgument(fmt::format("task placed on node {} outside [0, {})", t.node,
                                        config_.numNodes));
    }
    if (!t.body) throw InvalidArgument("task has no body");
  }

  struct Slot {
    TaskResult result;
    std::vector<Event> events;
    std::exception_ptr error;
  };
  const std::uint64_t jobIndex = nextJob_++;
  std::vector<Slot> slots(job.tasks.size());
  std::latch done(static_cast<std::ptrdiff_t>(job.tasks.size()));

  for (std::size_t i = 0; i < job.tasks.size(); ++i) {
    boost::asio::post(*pools_[job.tasks[i].node], [&, i] {
      const TaskSpec& spec = job.tasks[i];
      Slot& slot = slots[i];
      auto wallStart = std::chrono::steady_clock::now();
      for (int attempt = 0; attempt < 2; ++attempt) {
        TaskContext::Info info{static_cast<int>(i), spec.node,  job.kind, job.iteration,
                               jobIndex,            attempt,    spec.plannedPuts};
        auto kill = attempt == 0 ? faultFor(job.kind, job.iteration, static_cast<int>(i))
                                 : std::nullopt;
        TaskContext ctx(store_, config_.cost, info, kill);
        Event start{};
        start.type = EventType::kTaskStart;
        start.job = jobIndex;
        start.kind = job.kind;
        start.iteration = job.iteration;
        start.task = info.task;
        start.node = info.node;
        start.attempt = attempt;
        slot.events.push_back(start);
        ++slot.result.attempts;

        Event finish = start;
        try {
          spec.body(ctx);
          if (ctx.killPending()) {
            throw TaskKilled(fmt::format("task {} killed at completion", info.task));
          }
          slot.error = nullptr;
          finish.type = EventType::kTaskEnd;
          finish.digest = ctx.digest();
        } catch (const TaskKilled& k) {
          slot.error = std::current_exception();
          finish.type = EventType::kTaskKilled;
          finish.detail = k.what();
        } catch (...) {
          slot.error = std::current_exception();
          finish.type = EventType::kTaskFailed;
          finish.detail = describe(slot.error);
        }
        for (Event& e : ctx.takeEvents()) slot.events.push_back(std::move(e));
        slot.events.push_back(std::move(finish));
        slot.result.duration +=
            spec.fixedDuration.value_or(ctx.computeTime() + ctx.networkTime());
        if (!slot.error) {
          slot.result.compute = ctx.computeTime();
          slot.result.network = ctx.networkTime();
          slot.result.remoteBytes = ctx.remoteBytes();
          slot.result.digest = ctx.digest();
          break;
        }
      }
      slot.result.wallTime = std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now() - wallStart);
      done.count_down();
    });
  }
  done.wait();

  JobResult result;
  result.job = jobIndex;
  result.kind = job.kind;
  result.iteration = job.iteration;
  result.start = clock_;
  const double numTasks = static_cast<double>(job.tasks.size());
  result.schedulingOverhead = config_.scheduleCost * numTasks / config_.groupSize;
  result.schedulingEvents = job.iteration % config_.groupSize == 0 ? job.tasks.size() : 0;

  Event jobStart{};
  jobStart.type = EventType::kJobStart;
  jobStart.job = jobIndex;
  jobStart.kind = job.kind;
  jobStart.iteration = job.iteration;
  events_.append(jobStart);

  std::exception_ptr firstError;
  for (Slot& slot : slots) {
    for (Event& e : slot.events) events_.append(std::move(e));
    result.maxTaskDuration = std::max(result.maxTaskDuration, slot.result.duration);
    if (slot.error && !firstError) firstError = slot.error;
    result.tasks.push_back(std::move(slot.result));
  }
  result.makespan = result.schedulingOverhead + result.maxTaskDuration;
  clock_ += result.makespan;
  result.end = clock_;

  Event barrier = jobStart;
  barrier.type = EventType::kBarrier;
  barrier.clockMs = clock_.count();
  events_.append(barrier);

  if (firstError) std::rethrow_exception(firstError);
  return result;
}

}  // namespace shufflesgd
