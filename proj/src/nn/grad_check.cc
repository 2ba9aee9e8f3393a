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

#include "shufflesgd/nn/grad_check.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"
#include "shufflesgd/common/philox.h"

namespace shufflesgd::nn {

namespace {
constexpr double kStep = 1e-5;
constexpr double kDenominatorFloor = 1e-8;
constexpr std::size_t kMaxParams = 10'000;

// Independent forward evaluator for the finite-difference side. It shares no
// code with the layer implementations and runs in extended precision so the
// difference quotient is not dominated by double rounding on tiny gradients.
using Wide = long double;

struct WideMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Wide> v;
  Wide& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  Wide at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

WideMatrix evaluate(const LayerSpec& spec, const std::vector<Wide>& params, std::size_t& offset,
                    const WideMatrix& x) {
  if (const auto* l = std::get_if<LinearSpec>(&spec.node)) {
    WideMatrix y{x.rows, l->outDim, std::vector<Wide>(x.rows * l->outDim)};
    const Wide* w = params.data() + offset;
    const Wide* b = w + l->inDim * l->outDim;
    for (std::size_t r = 0; r < x.rows; ++r) {
      for (std::size_t o = 0; o < l->outDim; ++o) {
        Wide acc = b[o];
        for (std::size_t i = 0; i < l->inDim; ++i) acc += w[o * l->inDim + i] * x.at(r, i);
        y.at(r, o) = acc;
      }
    }
    offset += l->inDim * l->outDim + l->outDim;
    return y;
  }
  if (std::holds_alternative<ReluSpec>(spec.node)) {
    WideMatrix y = x;
    for (Wide& e : y.v) e = e > 0 ? e : 0;
    return y;
  }
  if (std::holds_alternative<SigmoidSpec>(spec.node)) {
    WideMatrix y = x;
    for (Wide& e : y.v) e = 1 / (1 + std::exp(-e));
    return y;
  }
  if (const auto* e = std::get_if<EmbeddingSpec>(&spec.node)) {
    WideMatrix y{x.rows, e->numFields * e->embedDim,
                 std::vector<Wide>(x.rows * e->numFields * e->embedDim)};
    for (std::size_t r = 0; r < x.rows; ++r) {
      for (std::size_t f = 0; f < e->numFields; ++f) {
        auto id = static_cast<std::size_t>(x.at(r, f));
        for (std::size_t d = 0; d < e->embedDim; ++d) {
          y.at(r, f * e->embedDim + d) = params[offset + id * e->embedDim + d];
        }
      }
    }
    offset += e->vocabSize * e->embedDim;
    return y;
  }
  if (const auto* c = std::get_if<ConcatSpec>(&spec.node)) {
    std::vector<WideMatrix> parts;
    std::size_t cols = 0;
    for (const auto& b : c->branches) {
      parts.push_back(evaluate(b, params, offset, x));
      cols += parts.back().cols;
    }
    WideMatrix y{x.rows, cols, std::vector<Wide>(x.rows * cols)};
    std::size_t col = 0;
    for (const auto& p : parts) {
      for (std::size_t r = 0; r < x.rows; ++r) {
        for (std::size_t k = 0; k < p.cols; ++k) y.at(r, col + k) = p.at(r, k);
      }
      col += p.cols;
    }
    return y;
  }
  const auto& seq = std::get<SequentialSpec>(spec.node);
  WideMatrix y = x;
  for (const auto& layer : seq.layers) y = evaluate(layer, params, offset, y);
  return y;
}

Wide referenceLoss(const LayerSpec& spec, const std::vector<Wide>& params, const WideMatrix& x,
                   const Tensor& target, Loss loss) {
  std::size_t offset = 0;
  WideMatrix z = evaluate(spec, params, offset, x);
  Wide sum = 0;
  auto y = target.data();
  for (std::size_t i = 0; i < z.v.size(); ++i) {
    if (loss == Loss::kMse) {
      Wide d = z.v[i] - y[i];
      sum += d * d;
    } else {
      Wide p = 1 / (1 + std::exp(-z.v[i]));
      sum -= y[i] * std::log(p) + (1 - y[i]) * std::log(1 - p);
    }
  }
  return sum / static_cast<Wide>(z.rows);
}

}  // namespace

GradientProblem makeGradientProblem(const LayerSpec& spec, Loss loss, std::uint64_t seed,
                                    std::size_t batchRows) {
  validate(spec);
  GradientProblem problem;
  problem.params = initParams(spec, seed);
  // Biases start at zero; perturb every coordinate so none sits at a special point.
  CounterRng paramRng(seed, RngPurpose::kGradCheck, 0);
  for (std::size_t j = 0; j < problem.params.size(); ++j) {
    problem.params[j] += 0.2 * (paramRng.uniform(j) - 0.5);
  }

  std::size_t inWidth = inputWidth(spec);
  std::size_t outWidth = outputWidth(spec, inWidth);
  CounterRng inputRng(seed, RngPurpose::kGradCheck, 1);
  std::vector<double> inputs(batchRows * inWidth);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    inputs[i] = takesIds(spec) ? static_cast<double>(inputRng.below(i, idBound(spec)))
                               : 2.0 * inputRng.uniform(i) - 1.0;
  }
  CounterRng targetRng(seed, RngPurpose::kGradCheck, 2);
  std::vector<double> targets(batchRows * outWidth);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    targets[i] = loss == Loss::kBce ? static_cast<double>(targetRng.below(i, 2))
                                    : 2.0 * targetRng.uniform(i) - 1.0;
  }
  problem.batch = Tensor::matrix(batchRows, inWidth, std::move(inputs));
  problem.target = Tensor::matrix(batchRows, outWidth, std::move(targets));
  return problem;
}

double gradientCheck(const LayerSpec& spec, Loss loss, std::uint64_t seed) {
  return gradientCheck(spec, loss, seed,
                       [&](std::span<const double> params, const Tensor& batch,
                           const Tensor& target) {
                         ModelReplica replica(spec, {params.begin(), params.end()});
                         return replica.backward(batch, target, loss).gradient;
                       });
}

double gradientCheck(const LayerSpec& spec, Loss loss, std::uint64_t seed,
                     const GradientFn& analytic) {
  if (paramCount(spec) > kMaxParams) {
    throw InvalidArgument(fmt::format("gradientCheck: K = {} exceeds {}", paramCount(spec),
                                      kMaxParams));
  }
  GradientProblem problem = makeGradientProblem(spec, loss, seed);
  std::vector<double> grad = analytic(problem.params, problem.batch, problem.target);
  if (grad.size() != problem.params.size()) {
    throw ShapeError("gradientCheck: analytic gradient has the wrong length");
  }

  WideMatrix x{problem.batch.rows(), problem.batch.cols(),
               std::vector<Wide>(problem.batch.data().begin(), problem.batch.data().end())};
  std::vector<Wide> shifted(problem.params.begin(), problem.params.end());

  double worst = 0.0;
  for (std::size_t j = 0; j < shifted.size(); ++j) {
    Wide original = shifted[j];
    shifted[j] = original + kStep;
    Wide up = referenceLoss(spec, shifted, x, problem.target, loss);
    shifted[j] = original - kStep;
    Wide down = referenceLoss(spec, shifted, x, problem.target, loss);
    shifted[j] = original;
    auto numeric = static_cast<double>((up - down) / (2 * static_cast<Wide>(kStep)));
    double denom = std::max({std::abs(grad[j]), std::abs(numeric), kDenominatorFloor});
    worst = std::max(worst, std::abs(grad[j] - numeric) / denom);
  }
  return worst;
}

}  // namespace shufflesgd::nn
