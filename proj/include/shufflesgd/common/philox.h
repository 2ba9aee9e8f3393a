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

#include <array>
#include <cstdint>

namespace shufflesgd {

// Philox4x32-10 block function (Salmon et al., Random123). Pure: the output
// depends only on (counter, key), so any draw can be recomputed in isolation.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key);
};

// Every random draw in the system names its purpose, so streams never overlap.
enum class RngPurpose : std::uint32_t {
  kInit = 1,
  kBatch = 2,
  kData = 3,
  kGradCheck = 4,
};

// Random access stream over Philox keyed by (seed, purpose, a, b).
// Draw `index` is a fixed function of the key, independent of call order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, RngPurpose purpose, std::uint32_t streamA = 0,
             std::uint32_t streamB = 0);

  std::uint64_t bits(std::uint64_t index) const;
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform(std::uint64_t index) const;
  // Uniform integer on [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t index, std::uint64_t bound) const;
  // Standard normal via Box-Muller on draws (2*index, 2*index + 1).
  double normal(std::uint64_t index) const;

 private:
  Philox4x32::Key key_;
  std::uint32_t streamA_;
  std::uint32_t streamB_;
  std::uint32_t purpose_;
};

}  // namespace shufflesgd
