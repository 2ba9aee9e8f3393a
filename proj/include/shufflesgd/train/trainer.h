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

#include <memory>
#include <span>
#include <vector>

#include "shufflesgd/engine/dataset.h"
#include "shufflesgd/sim/cluster.h"
#include "shufflesgd/sim/sync_overhead.h"
#include "shufflesgd/train/config.h"
#include "shufflesgd/train/slice_layout.h"

namespace shufflesgd {

struct TrainOptions {
  // numNodes is overridden with the partition count: task n runs on node n.
  ClusterConfig cluster;
  // Virtual compute charged to every forward-backward task.
  SimDuration forwardBackwardCompute{1.0};
  // Drop blocks older than the previous iteration at the start of each one.
  bool evictOldBlocks = true;
  // Drop every cached partition before each job so tasks rebuild their inputs
  // from lineage. Results must not change.
  bool dropCachesBetweenJobs = false;
};

struct TrainResult {
  std::vector<double> finalParams;
  std::vector<IterationStats> stats;
};

// Synchronous data-parallel SGD driver. Each iteration runs a
// forward-backward job followed by a parameter-sync job, each with one task
// per partition. Gradients and weights travel only as slice blocks through
// the cluster's block store.
class Trainer {
 public:
  Trainer(TrainingConfig config, std::vector<Record> samples, TrainOptions options = {});
  ~Trainer();

  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  TrainResult run();

  const TrainingConfig& config() const { return config_; }
  const SliceLayout& layout() const { return layout_; }
  Cluster& cluster() { return *cluster_; }
  DatasetEngine& engine() { return *engine_; }
  DatasetId sampleDataset() const { return samples_; }
  DatasetId modelDataset() const { return models_; }
  DatasetId zippedDataset() const { return zipped_; }

 private:
  JobSpec forwardBackwardJob(std::int64_t iteration, std::vector<double>& losses);
  JobSpec parameterSyncJob(std::int64_t iteration);
  void dropCaches();

  TrainingConfig config_;
  TrainOptions options_;
  SliceLayout layout_;
  std::size_t inputWidth_;
  std::size_t targetWidth_;
  std::unique_ptr<Cluster> cluster_;
  std::unique_ptr<DatasetEngine> engine_;
  DatasetId samples_;
  DatasetId models_;
  DatasetId zipped_;
  bool ran_ = false;
};

TrainResult train(const TrainingConfig& config, std::vector<Record> samples,
                  TrainOptions options = {});

// Single-process reference with the same batches and the same arithmetic
// order: per-task gradients summed in ascending task order, scaled, then one
// SGD step on the full vector.
std::vector<double> sequentialOracle(const TrainingConfig& config,
                                     std::span<const Record> samples);

}  // namespace shufflesgd
