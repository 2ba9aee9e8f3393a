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

#include "shufflesgd/nn/layer_spec.h"
#include "shufflesgd/nn/tensor.h"

namespace shufflesgd::nn::detail {

// Executable form of a LayerSpec. Each instance owns the activations its
// backward pass needs, so a compiled layer tree belongs to exactly one replica.
class Layer {
 public:
  virtual ~Layer() = default;

  // `params` is the full flat vector; layers read their own sub-range.
  virtual Tensor forward(const Tensor& input, std::span<const double> params) = 0;
  // Accumulates into `gradParams` (full flat vector) and returns d loss / d input.
  virtual Tensor backward(const Tensor& gradOutput, std::span<const double> params,
                          std::span<double> gradParams) = 0;
};

// Builds the layer tree, assigning parameter ranges in layout order starting
// at `offset`, which is advanced past the spec's parameters.
std::unique_ptr<Layer> buildLayer(const LayerSpec& spec, std::size_t& offset);

}  // namespace shufflesgd::nn::detail
