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

#include "shufflesgd/train/trainer.h"

#include <algorithm>

#include <fmt/format.h>

#include "shufflesgd/nn/model.h"
#include "shufflesgd/train/tasks.h"

namespace shufflesgd {

Trainer::Trainer(TrainingConfig config, std::vector<Record> samples, TrainOptions options)
    : config_(std::move(config)),
      options_(std::move(options)),
      layout_(nn::paramCount(config_.modelSpec), std::max(config_.numPartitions, 1)),
      inputWidth_(0),
      targetWidth_(0) {
  validate(config_);
  inputWidth_ = recordInputWidth(config_);
  targetWidth_ = recordTargetWidth(config_);
  options_.cluster.numNodes = config_.numPartitions;
  cluster_ = std::make_unique<Cluster>(options_.cluster);
  engine_ = std::make_unique<DatasetEngine>(config_.numPartitions, &cluster_->network());
  TrainingDatasets ds = buildTrainingDatasets(*engine_, config_, std::move(samples));
  samples_ = ds.samples;
  models_ = ds.models;
  zipped_ = ds.zipped;
}

Trainer::~Trainer() = default;

JobSpec Trainer::forwardBackwardJob(std::int64_t iteration, std::vector<double>& losses) {
  TaskEnv env{config_, layout_, *engine_, {samples_, models_, zipped_},
              options_.forwardBackwardCompute};
  JobSpec job{JobKind::kForwardBackward, iteration, {}};
  for (int n = 0; n < config_.numPartitions; ++n) {
    job.tasks.push_back(TaskSpec{n, config_.numPartitions,
                                 [env, &losses](TaskContext& ctx) {
                                   losses[ctx.taskId()] = forwardBackwardTask(ctx, env);
                                 },
                                 std::nullopt});
  }
  return job;
}

JobSpec Trainer::parameterSyncJob(std::int64_t iteration) {
  TaskEnv env{config_, layout_, *engine_, {samples_, models_, zipped_},
              options_.forwardBackwardCompute};
  JobSpec job{JobKind::kParameterSync, iteration, {}};
  for (int n = 0; n < config_.numPartitions; ++n) {
    job.tasks.push_back(
        TaskSpec{n, 1, [env](TaskContext& ctx) { parameterSyncTask(ctx, env); }, std::nullopt});
  }
  return job;
}

void Trainer::dropCaches() {
  for (DatasetId ds : {samples_, models_}) {
    for (int p = 0; p < config_.numPartitions; ++p) engine_->dropCached(ds, p);
  }
}

TrainResult Trainer::run() {
  if (ran_) throw SequencingError("Trainer::run may only be called once");
  ran_ = true;
  const int n = config_.numPartitions;
  TrainResult result;

  for (std::int64_t i = 0; i < config_.iterations; ++i) {
    auto wallStart = std::chrono::steady_clock::now();
    if (options_.evictOldBlocks) cluster_->store().evictBefore(i - 1);
    if (options_.dropCachesBetweenJobs) dropCaches();

    std::vector<double> losses(static_cast<std::size_t>(n), 0.0);
    JobResult fb = cluster_->submitJob(forwardBackwardJob(i, losses));
    for (const TaskResult& t : fb.tasks) {
      if (t.digest != fb.tasks.front().digest) {
        throw SequencingError(fmt::format(
            "iteration {}: replicas disagree at forward-backward start ({} vs {})", i,
            fb.tasks.front().digest, t.digest));
      }
    }

    if (options_.dropCachesBetweenJobs) dropCaches();
    JobResult sync = cluster_->submitJob(parameterSyncJob(i));

    IterationStats s;
    s.iteration = i;
    SimDuration maxFetch{0};
    for (const TaskResult& t : fb.tasks) {
      s.perTaskComputeTime.push_back(t.compute);
      maxFetch = std::max(maxFetch, t.network);
    }
    s.syncTime = sync.makespan + maxFetch;
    s.schedulingEvents = fb.schedulingEvents + sync.schedulingEvents;
    double lossSum = 0.0;
    for (double l : losses) lossSum += l;
    s.lossMean = lossSum / n;
    s.forwardBackwardMakespan = fb.makespan;
    s.syncMakespan = sync.makespan;
    s.retries = fb.retries() + sync.retries();
    s.wallTime = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::steady_clock::now() - wallStart);
    result.stats.push_back(std::move(s));
  }

  const NetworkStats& net = cluster_->network();
  for (IterationStats& s : result.stats) {
    for (int node = 0; node < n; ++node) {
      s.shuffleBytes += net.node(node, s.iteration, TrafficPhase::kShuffle).outbound;
      s.broadcastBytes += net.node(node, s.iteration, TrafficPhase::kBroadcast).outbound;
    }
  }

  if (config_.iterations == 0) {
    result.finalParams = nn::initParams(config_.modelSpec, config_.seed);
    return result;
  }
  result.finalParams.resize(layout_.totalParams());
  for (int slice = 0; slice < n; ++slice) {
    auto blob = cluster_->store().peek(weightSliceId(config_.iterations - 1, slice));
    if (!blob) {
      throw SequencingError(fmt::format("final weight slice {} missing", slice));
    }
    auto dst = layout_.slice(std::span<double>(result.finalParams), slice);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = blob->at(j);
  }
  return result;
}

TrainResult train(const TrainingConfig& config, std::vector<Record> samples,
                  TrainOptions options) {
  Trainer trainer(config, std::move(samples), std::move(options));
  return trainer.run();
}

}  // namespace shufflesgd
