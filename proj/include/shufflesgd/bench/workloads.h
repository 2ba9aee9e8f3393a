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
#include <span>
#include <string_view>
#include <vector>

#include "shufflesgd/engine/transform_registry.h"
#include "shufflesgd/nn/layer_spec.h"
#include "shufflesgd/nn/model.h"

namespace shufflesgd::bench {

enum class WorkloadKind : std::uint8_t { kXorMlp, kLinReg, kToyNcf };

std::string_view toString(WorkloadKind kind);  // "xor_mlp", "lin_reg", "toy_ncf"
WorkloadKind parseWorkload(std::string_view text);

inline constexpr WorkloadKind kAllWorkloads[] = {WorkloadKind::kXorMlp, WorkloadKind::kLinReg,
                                                 WorkloadKind::kToyNcf};

// A generated training problem. Records are [inputs..., targets...].
struct Workload {
  WorkloadKind kind = WorkloadKind::kXorMlp;
  nn::LayerSpec spec = nn::Linear(1, 1);
  nn::Loss loss = nn::Loss::kMse;
  std::vector<Record> samples;
  // LinReg only: the generating weights in parameter order (W row, then b).
  std::vector<double> planted;
};

// Fully determined by (kind, seed).
//   xor_mlp: 2-8-1 sigmoid MLP, MSE, 256 noisy XOR corners.
//   lin_reg: Linear(8,1), MSE, 512 noise-free samples from planted weights.
//   toy_ncf: 16 users x 16 items, 8-dim embeddings, 16-16-1 MLP tower, BCE on
//            logits, 1024 implicit-feedback pairs labelled by the sign of a
//            planted rank-2 affinity.
Workload makeWorkload(WorkloadKind kind, std::uint64_t seed);

// Mean loss of params over every sample of the workload.
double datasetLoss(const Workload& workload, std::span<const double> params);

// Bench-comm model: Embedding(K, 1) with MSE has exactly K parameters.
// Records are [id, 0].
nn::LayerSpec commModel(std::size_t paramCount);
std::vector<Record> commSamples(std::size_t paramCount, std::size_t count);

}  // namespace shufflesgd::bench
