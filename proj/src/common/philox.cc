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

#include "shufflesgd/common/philox.h"

#include <cmath>
#include <numbers>

#include "shufflesgd/common/errors.h"

namespace shufflesgd {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53U;
constexpr std::uint32_t kMul1 = 0xCD9E8D57U;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9U;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85U;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

CounterRng::CounterRng(std::uint64_t seed, RngPurpose purpose, std::uint32_t streamA,
                       std::uint32_t streamB)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      streamA_(streamA),
      streamB_(streamB),
      purpose_(static_cast<std::uint32_t>(purpose)) {}

std::uint64_t CounterRng::bits(std::uint64_t index) const {
  // Each Philox block yields two 64-bit draws.
  std::uint64_t blockIndex = index >> 1;
  if (blockIndex > 0xffffffffULL) {
    throw InvalidArgument("CounterRng: draw index out of range");
  }
  auto out = Philox4x32::block(
      {static_cast<std::uint32_t>(blockIndex), streamA_, streamB_, purpose_}, key_);
  std::size_t half = (index & 1U) * 2;
  return (static_cast<std::uint64_t>(out[half + 1]) << 32) | out[half];
}

double CounterRng::uniform(std::uint64_t index) const {
  return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t index, std::uint64_t bound) const {
  if (bound == 0) throw InvalidArgument("CounterRng::below: bound must be positive");
  // Multiply-shift range reduction; bias is below 2^-40 for the bounds used here.
  __extension__ using U128 = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<U128>(bits(index)) * bound) >> 64);
}

double CounterRng::normal(std::uint64_t index) const {
  double u1 = 1.0 - uniform(2 * index);  // (0, 1]
  double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace shufflesgd
