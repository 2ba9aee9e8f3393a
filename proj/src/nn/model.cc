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

#include "shufflesgd/nn/model.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "layers.h"
#include "shufflesgd/common/errors.h"
#include "shufflesgd/common/philox.h"

namespace shufflesgd::nn {

namespace {

void checkSameShape(const Tensor& prediction, const Tensor& target) {
  if (prediction.shape() != target.shape()) {
    throw ShapeError(fmt::format("prediction shape {} does not match target shape {}",
                                 prediction.shape(), target.shape()));
  }
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// Walks the spec in layout order and fills weights.
void initInto(const LayerSpec& spec, const CounterRng& rng, std::vector<double>& out,
              std::size_t& offset) {
  auto uniformBlock = [&](std::size_t count, double bound) {
    for (std::size_t j = 0; j < count; ++j, ++offset) {
      out[offset] = (2.0 * rng.uniform(offset) - 1.0) * bound;
    }
  };
  if (const auto* l = std::get_if<LinearSpec>(&spec.node)) {
    uniformBlock(l->inDim * l->outDim, std::sqrt(6.0 / static_cast<double>(l->inDim + l->outDim)));
    offset += l->outDim;  // biases stay zero
  } else if (const auto* e = std::get_if<EmbeddingSpec>(&spec.node)) {
    uniformBlock(e->vocabSize * e->embedDim,
                 std::sqrt(6.0 / static_cast<double>(e->vocabSize + e->embedDim)));
  } else if (const auto* c = std::get_if<ConcatSpec>(&spec.node)) {
    for (const auto& b : c->branches) initInto(b, rng, out, offset);
  } else if (const auto* s = std::get_if<SequentialSpec>(&spec.node)) {
    for (const auto& layer : s->layers) initInto(layer, rng, out, offset);
  }
}

}  // namespace

std::string_view toString(Loss loss) { return loss == Loss::kMse ? "mse" : "bce"; }

std::vector<double> initParams(const LayerSpec& spec, std::uint64_t seed) {
  validate(spec);
  std::vector<double> params(paramCount(spec), 0.0);
  CounterRng rng(seed, RngPurpose::kInit);
  std::size_t offset = 0;
  initInto(spec, rng, params, offset);
  return params;
}

ModelReplica::ModelReplica(LayerSpec spec, std::vector<double> params)
    : spec_(std::move(spec)), params_(std::move(params)) {
  validate(spec_);
  if (params_.size() != nn::paramCount(spec_)) {
    throw ShapeError(fmt::format("{} needs {} parameters, got {}", toString(spec_),
                                 nn::paramCount(spec_), params_.size()));
  }
  std::size_t offset = 0;
  root_ = detail::buildLayer(spec_, offset);
}

ModelReplica::~ModelReplica() = default;
ModelReplica::ModelReplica(ModelReplica&&) noexcept = default;
ModelReplica& ModelReplica::operator=(ModelReplica&&) noexcept = default;

void ModelReplica::setParams(std::span<const double> params) {
  if (params.size() != params_.size()) {
    throw ShapeError(fmt::format("setParams: expected {} values, got {}", params_.size(),
                                 params.size()));
  }
  params_.assign(params.begin(), params.end());
}

Tensor ModelReplica::forward(const Tensor& batch) {
  if (batch.rank() != 2) throw ShapeError("forward: batch must be rank 2 [rows, features]");
  Tensor out = root_->forward(batch, params_);
  out.checkFinite("forward activation");
  return out;
}

LossAndGradient ModelReplica::backward(const Tensor& batch, const Tensor& target, Loss loss) {
  Tensor prediction = forward(batch);
  LossAndGradient result;
  result.loss = lossValue(prediction, target, loss);
  result.gradient.assign(params_.size(), 0.0);
  root_->backward(lossGradient(prediction, target, loss), params_, result.gradient);
  if (!std::isfinite(result.loss)) throw NonFiniteError("backward: non-finite loss");
  for (std::size_t j = 0; j < result.gradient.size(); ++j) {
    if (!std::isfinite(result.gradient[j])) {
      throw NonFiniteError(fmt::format("backward: non-finite gradient at parameter {}", j));
    }
  }
  return result;
}

double lossValue(const Tensor& prediction, const Tensor& target, Loss loss) {
  checkSameShape(prediction, target);
  auto p = prediction.data();
  auto y = target.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (loss == Loss::kMse) {
      double d = p[i] - y[i];
      sum += d * d;
    } else {
      // -[y log s(z) + (1 - y) log(1 - s(z))] written so it cannot overflow.
      sum += std::max(p[i], 0.0) - y[i] * p[i] + std::log1p(std::exp(-std::abs(p[i])));
    }
  }
  return sum / static_cast<double>(prediction.rows());
}

Tensor lossGradient(const Tensor& prediction, const Tensor& target, Loss loss) {
  checkSameShape(prediction, target);
  double scale = 1.0 / static_cast<double>(prediction.rows());
  Tensor g = prediction;
  auto p = prediction.data();
  auto y = target.data();
  auto out = g.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (loss == Loss::kMse) {
      out[i] = 2.0 * (p[i] - y[i]) * scale;
    } else {
      out[i] = (logistic(p[i]) - y[i]) * scale;
    }
  }
  return g;
}

}  // namespace shufflesgd::nn
