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

#include "shufflesgd/common/hash.h"

#include <bit>

#include <fmt/format.h>

namespace shufflesgd {

namespace {
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
}

void Fnv1a64::update(std::span<const std::byte> bytes) {
  for (std::byte b : bytes) {
    state_ ^= static_cast<std::uint64_t>(b);
    state_ *= kFnvPrime;
  }
}

void Fnv1a64::update(std::string_view text) {
  update(std::as_bytes(std::span(text.data(), text.size())));
}

void Fnv1a64::update(std::span<const double> values) {
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      state_ ^= (bits >> (8 * i)) & 0xffU;
      state_ *= kFnvPrime;
    }
  }
}

std::uint64_t hashBytes(std::span<const std::byte> bytes) {
  Fnv1a64 h;
  h.update(bytes);
  return h.digest();
}

std::uint64_t hashValues(std::span<const double> values) {
  Fnv1a64 h;
  h.update(values);
  return h.digest();
}

std::string toHex(std::uint64_t value) { return fmt::format("{:016x}", value); }

}  // namespace shufflesgd
