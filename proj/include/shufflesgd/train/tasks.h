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

#include <span>
#include <utility>

#include "shufflesgd/engine/dataset.h"
#include "shufflesgd/sim/cluster.h"
#include "shufflesgd/train/config.h"
#include "shufflesgd/train/slice_layout.h"

namespace shufflesgd {

struct TrainingDatasets {
  DatasetId samples;  // N cached partitions, round-robin
  DatasetId models;   // N cached single-record partitions holding initParams
  DatasetId zipped;   // samples zipped with models, partition by partition
};

// Partition p of both datasets is placed on node p % engine.numNodes().
TrainingDatasets buildTrainingDatasets(DatasetEngine& engine, const TrainingConfig& config,
                                       std::vector<Record> samples);

// Everything a task body reads besides its context. Shared read-only by all
// tasks of a job.
struct TaskEnv {
  const TrainingConfig& config;
  const SliceLayout& layout;
  DatasetEngine& engine;
  TrainingDatasets datasets;
  SimDuration forwardBackwardCompute{0};
};

// Task n of iteration i: rebuild the latest weights from WeightSlice(i-1, *)
// (initial replica at i = 0), draw a local batch, and publish the gradient as
// GradientSlice(i, n, 0..N-1). Returns the batch loss.
double forwardBackwardTask(TaskContext& ctx, const TaskEnv& env);

// Task n of iteration i: sum GradientSlice(i, t, n) over t ascending, scale
// per the aggregation mode, step slice n of the previous weights and publish
// WeightSlice(i, n).
void parameterSyncTask(TaskContext& ctx, const TaskEnv& env);

}  // namespace shufflesgd
