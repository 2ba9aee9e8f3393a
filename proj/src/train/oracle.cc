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

#include <fmt/format.h>

#include "shufflesgd/nn/model.h"
#include "shufflesgd/nn/optim.h"
#include "shufflesgd/train/batch.h"
#include "shufflesgd/train/trainer.h"

namespace shufflesgd {

std::vector<double> sequentialOracle(const TrainingConfig& config,
                                     std::span<const Record> samples) {
  validate(config);
  const int n = config.numPartitions;
  if (samples.size() < static_cast<std::size_t>(n)) {
    throw InvalidArgument(fmt::format("{} samples cannot fill {} partitions", samples.size(), n));
  }
  std::vector<std::vector<Record>> parts;
  for (int p = 0; p < n; ++p) parts.push_back(roundRobinPartition(samples, n, p));
  const std::size_t inWidth = recordInputWidth(config);
  const std::size_t tgtWidth = recordTargetWidth(config);

  std::vector<double> params = nn::initParams(config.modelSpec, config.seed);
  nn::ModelReplica replica(config.modelSpec, params);
  for (std::int64_t i = 0; i < config.iterations; ++i) {
    replica.setParams(params);
    std::vector<double> total(params.size(), 0.0);
    for (int p = 0; p < n; ++p) {
      auto idx = sampleBatchIndices(config.seed, p, i, parts[p].size(), config.perTaskBatch);
      Batch batch = makeBatch(parts[p], idx, inWidth, tgtWidth);
      nn::LossAndGradient lg = replica.backward(batch.inputs, batch.targets, config.loss);
      for (std::size_t j = 0; j < total.size(); ++j) total[j] += lg.gradient[j];
    }
    if (config.aggregation == Aggregation::kSumThenScaleByN) {
      for (double& v : total) v /= n;
    }
    params = nn::sgdStep(params, total, config.learningRate);
  }
  return params;
}

}  // namespace shufflesgd
