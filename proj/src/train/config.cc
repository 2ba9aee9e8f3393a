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

#include "shufflesgd/train/config.h"

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"

namespace shufflesgd {

std::string_view toString(Aggregation aggregation) {
  return aggregation == Aggregation::kSum ? "sum" : "sum_then_scale_by_n";
}

Aggregation parseAggregation(std::string_view text) {
  if (text == "sum") return Aggregation::kSum;
  if (text == "sum_then_scale_by_n") return Aggregation::kSumThenScaleByN;
  throw InvalidArgument(fmt::format("unknown aggregation '{}'", text));
}

void validate(const TrainingConfig& config) {
  if (config.numPartitions < 1) throw InvalidArgument("numPartitions must be >= 1");
  if (config.iterations < 0) throw InvalidArgument("iterations must be >= 0");
  if (config.perTaskBatch < 1) throw InvalidArgument("perTaskBatch must be >= 1");
  if (!(config.learningRate > 0.0)) throw InvalidArgument("learningRate must be positive");
  nn::validate(config.modelSpec);
  recordTargetWidth(config);
}

std::size_t recordInputWidth(const TrainingConfig& config) {
  return nn::inputWidth(config.modelSpec);
}

std::size_t recordTargetWidth(const TrainingConfig& config) {
  return nn::outputWidth(config.modelSpec, recordInputWidth(config));
}

}  // namespace shufflesgd
