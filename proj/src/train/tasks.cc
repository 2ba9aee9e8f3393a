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

#include "shufflesgd/train/tasks.h"

#include <algorithm>

#include <fmt/format.h>

#include "shufflesgd/common/hash.h"
#include "shufflesgd/nn/model.h"
#include "shufflesgd/nn/optim.h"
#include "shufflesgd/train/batch.h"

namespace shufflesgd {

TrainingDatasets buildTrainingDatasets(DatasetEngine& engine, const TrainingConfig& config,
                                       std::vector<Record> samples) {
  validate(config);
  const int n = config.numPartitions;
  if (samples.size() < static_cast<std::size_t>(n)) {
    throw InvalidArgument(fmt::format("{} samples cannot fill {} partitions", samples.size(), n));
  }
  const std::size_t width = recordInputWidth(config) + recordTargetWidth(config);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    if (samples[r].size() != width) {
      throw ShapeError(fmt::format("sample {} has width {}, expected {}", r, samples[r].size(),
                                   width));
    }
  }
  TrainingDatasets out;
  out.samples = engine.parallelize(std::move(samples), n);
  std::vector<Record> replicas(static_cast<std::size_t>(n),
                               nn::initParams(config.modelSpec, config.seed));
  out.models = engine.parallelize(std::move(replicas), n);
  engine.cachePartitions(out.samples);
  engine.cachePartitions(out.models);
  out.zipped = engine.zipPartitions(out.samples, out.models);
  return out;
}

double forwardBackwardTask(TaskContext& ctx, const TaskEnv& env) {
  const int n = ctx.taskId();
  const std::int64_t i = ctx.iteration();
  const int slices = env.layout.numSlices();
  Partition part = env.engine.materialize(env.datasets.zipped, n, ctx.node());
  std::span<const Record> samples = part->left().records();
  const Record& initial = part->right().records().front();

  nn::ModelReplica replica(env.config.modelSpec, initial);
  if (i > 0) {
    std::vector<double> weights(env.layout.totalParams());
    for (int s = 0; s < slices; ++s) {
      Blob blob = ctx.get(weightSliceId(i - 1, s));
      auto dst = env.layout.slice(std::span<double>(weights), s);
      if (blob.size() != dst.size()) {
        throw ShapeError(fmt::format("{} holds {} values, slice has {}",
                                     weightSliceId(i - 1, s).str(), blob.size(), dst.size()));
      }
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = blob.at(j);
    }
    replica.setParams(weights);
  }
  ctx.setDigest(toHex(hashValues(replica.params())));

  auto indices =
      sampleBatchIndices(env.config.seed, n, i, samples.size(), env.config.perTaskBatch);
  Batch batch = makeBatch(samples, indices, recordInputWidth(env.config),
                          recordTargetWidth(env.config));
  nn::LossAndGradient lg = replica.backward(batch.inputs, batch.targets, env.config.loss);
  ctx.chargeCompute(env.forwardBackwardCompute);

  for (int s = 0; s < slices; ++s) {
    ctx.put(gradientSliceId(i, n, s),
            Blob::fromValues(env.layout.slice(std::span<const double>(lg.gradient), s)));
  }
  return lg.loss;
}

void parameterSyncTask(TaskContext& ctx, const TaskEnv& env) {
  const int n = ctx.taskId();
  const std::int64_t i = ctx.iteration();
  const int tasks = env.layout.numSlices();
  const std::size_t width = env.layout.size(n);

  std::vector<double> sum(width, 0.0);
  for (int t = 0; t < tasks; ++t) {
    Blob blob = ctx.get(gradientSliceId(i, t, n));
    if (blob.size() != width) {
      throw ShapeError(fmt::format("{} holds {} values, slice has {}",
                                   gradientSliceId(i, t, n).str(), blob.size(), width));
    }
    for (std::size_t j = 0; j < width; ++j) sum[j] += blob.at(j);
  }
  if (env.config.aggregation == Aggregation::kSumThenScaleByN) {
    for (double& v : sum) v /= tasks;
  }

  std::vector<double> previous;
  if (i == 0) {
    Partition part = env.engine.materialize(env.datasets.models, n, ctx.node());
    const Record& initial = part->records().front();
    auto s = env.layout.slice(std::span<const double>(initial), n);
    previous.assign(s.begin(), s.end());
  } else {
    previous = ctx.get(weightSliceId(i - 1, n)).values();
    if (previous.size() != width) {
      throw ShapeError(fmt::format("{} holds {} values, slice has {}",
                                   weightSliceId(i - 1, n).str(), previous.size(), width));
    }
  }

  std::vector<double> updated = nn::sgdStep(previous, sum, env.config.learningRate);
  ctx.chargeUpdate(width);
  ctx.put(weightSliceId(i, n), Blob::fromValues(updated));
}

}  // namespace shufflesgd
