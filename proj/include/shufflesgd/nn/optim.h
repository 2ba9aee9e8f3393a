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

#include <span>
#include <vector>

namespace shufflesgd::nn {

// out[j] = params[j] - learningRate * gradient[j]. Elementwise, so applying it
// to contiguous slices and concatenating equals applying it to the whole
// vector; the sync job relies on this.
std::vector<double> sgdStep(std::span<const double> params, std::span<const double> gradient,
                            double learningRate);

}  // namespace shufflesgd::nn
