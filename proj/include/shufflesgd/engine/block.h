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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace shufflesgd {

enum class BlockKind : std::uint8_t { kGradientSlice, kWeightSlice };

std::string_view toString(BlockKind kind);

struct BlockId {
  BlockKind kind = BlockKind::kGradientSlice;
  std::int64_t iteration = 0;
  // Producing task. For weight slices this is always the slice index.
  std::int32_t sourceTask = 0;
  std::int32_t sliceIndex = 0;

  auto operator<=>(const BlockId&) const = default;

  std::string str() const;
};

BlockId gradientSliceId(std::int64_t iteration, int sourceTask, int sliceIndex);
BlockId weightSliceId(std::int64_t iteration, int sliceIndex);

// Immutable f64 array in its wire form: an 8-byte little-endian element
// count followed by the elements as little-endian IEEE-754 doubles.
// Copies share the underlying bytes.
class Blob {
 public:
  static constexpr std::size_t kHeaderBytes = 8;

  Blob();
  static Blob fromValues(std::span<const double> values);
  // Validates the header against the byte length.
  static Blob fromBytes(std::vector<std::byte> bytes);

  std::span<const std::byte> bytes() const { return *bytes_; }
  std::size_t size() const;
  // Bytes of element data, excluding the header.
  std::size_t payloadBytes() const { return size() * sizeof(double); }
  double at(std::size_t i) const;
  std::vector<double> values() const;

  friend bool operator==(const Blob& a, const Blob& b);

 private:
  explicit Blob(std::shared_ptr<const std::vector<std::byte>> bytes) : bytes_(std::move(bytes)) {}

  std::shared_ptr<const std::vector<std::byte>> bytes_;
};

}  // namespace shufflesgd
