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
#include <string_view>

#include "shufflesgd/nn/layer_spec.h"
#include "shufflesgd/nn/model.h"

namespace shufflesgd {

enum class Aggregation : std::uint8_t {
  kSumThenScaleByN,  // mean of the per-task mean gradients
  kSum,
};

std::string_view toString(Aggregation aggregation);
// Accepts "sum_then_scale_by_n" and "sum".
Aggregation parseAggregation(std::string_view text);

// Every sample record is [inputs..., targets...]; widths come from the model.
struct TrainingConfig {
  int numPartitions = 1;
  std::int64_t iterations = 1;
  int perTaskBatch = 1;
  double learningRate = 0.1;
  std::uint64_t seed = 0;
  Aggregation aggregation = Aggregation::kSumThenScaleByN;
  nn::LayerSpec modelSpec = nn::Linear(1, 1);
  nn::Loss loss = nn::Loss::kMse;
};

// Throws InvalidArgument or ShapeError.
void validate(const TrainingConfig& config);

std::size_t recordInputWidth(const TrainingConfig& config);
std::size_t recordTargetWidth(const TrainingConfig& config);

}  // namespace shufflesgd
