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
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "shufflesgd/nn/layer_spec.h"
#include "shufflesgd/nn/tensor.h"

namespace shufflesgd::nn {

namespace detail {
class Layer;
}

// Both losses sum over output columns and take the mean over batch rows.
// kBce consumes logits: the sigmoid is applied inside the loss, so
// probabilities always lie in (0, 1) and saturation cannot produce log(0).
enum class Loss { kMse, kBce };

std::string_view toString(Loss loss);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // d(mean batch loss) / d params, length K
};

// Deterministic initialization: Linear and Embedding weights are uniform in
// [-a, a] with a = sqrt(6 / (fanIn + fanOut)), drawn from the Philox stream
// keyed by `seed` at the parameter's flat index; biases are zero.
std::vector<double> initParams(const LayerSpec& spec, std::uint64_t seed);

// A model replica: a spec plus its own flat parameter vector. Layout is layer
// order, then row-major within each layer (Linear stores W[out][in] then b).
// Replicas never share parameter storage; forward and backward never modify
// the parameters.
class ModelReplica {
 public:
  ModelReplica(LayerSpec spec, std::vector<double> params);
  ~ModelReplica();
  ModelReplica(ModelReplica&&) noexcept;
  ModelReplica& operator=(ModelReplica&&) noexcept;

  const LayerSpec& spec() const { return spec_; }
  std::span<const double> params() const { return params_; }
  std::size_t paramCount() const { return params_.size(); }
  void setParams(std::span<const double> params);

  Tensor forward(const Tensor& batch);
  // Runs the forward pass internally, so no prior forward() call is needed.
  LossAndGradient backward(const Tensor& batch, const Tensor& target, Loss loss);

 private:
  LayerSpec spec_;
  std::vector<double> params_;
  std::unique_ptr<detail::Layer> root_;
};

// Mean batch loss and d loss / d prediction for the given loss.
double lossValue(const Tensor& prediction, const Tensor& target, Loss loss);
Tensor lossGradient(const Tensor& prediction, const Tensor& target, Loss loss);

}  // namespace shufflesgd::nn
