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
#include <functional>
#include <span>
#include <vector>

#include "shufflesgd/nn/layer_spec.h"
#include "shufflesgd/nn/model.h"

namespace shufflesgd::nn {

// Analytic gradient under test: (params, batch, target) -> gradient.
using GradientFn =
    std::function<std::vector<double>(std::span<const double>, const Tensor&, const Tensor&)>;

struct GradientProblem {
  std::vector<double> params;
  Tensor batch;
  Tensor target;
};

// Random parameters, inputs and targets for `spec`, all derived from `seed`.
// Inputs are ids for embedding models; BCE targets are 0/1 labels.
GradientProblem makeGradientProblem(const LayerSpec& spec, Loss loss, std::uint64_t seed,
                                    std::size_t batchRows = 4);

// Compares an analytic gradient against central differences with h = 1e-5
// (evaluated by an independent extended-precision forward pass),
// coordinate by coordinate. Returns max |a - n| / max(|a|, |n|, 1e-8).
double gradientCheck(const LayerSpec& spec, Loss loss, std::uint64_t seed);
double gradientCheck(const LayerSpec& spec, Loss loss, std::uint64_t seed,
                     const GradientFn& analytic);

}  // namespace shufflesgd::nn
