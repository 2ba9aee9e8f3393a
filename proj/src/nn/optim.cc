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

#include "shufflesgd/nn/optim.h"

#include <cmath>

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"

namespace shufflesgd::nn {

std::vector<double> sgdStep(std::span<const double> params, std::span<const double> gradient,
                            double learningRate) {
  if (params.size() != gradient.size()) {
    throw InvalidArgument(fmt::format("sgdStep: {} params but {} gradient entries", params.size(),
                                      gradient.size()));
  }
  if (!(learningRate > 0.0) || !std::isfinite(learningRate)) {
    throw InvalidArgument(fmt::format("sgdStep: learning rate {} must be positive", learningRate));
  }
  std::vector<double> out(params.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = params[j] - learningRate * gradient[j];
    if (!std::isfinite(out[j])) {
      throw NonFiniteError(fmt::format("sgdStep: non-finite update at parameter {}", j));
    }
  }
  return out;
}

}  // namespace shufflesgd::nn
