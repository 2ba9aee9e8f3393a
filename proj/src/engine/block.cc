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

#include "shufflesgd/engine/block.h"

#include <algorithm>
#include <bit>

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"

namespace shufflesgd {

namespace {

void storeLe64(std::byte* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::byte>((v >> (8 * i)) & 0xffU);
}

std::uint64_t loadLe64(const std::byte* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

}  // namespace

std::string_view toString(BlockKind kind) {
  return kind == BlockKind::kGradientSlice ? "gradient" : "weight";
}

std::string BlockId::str() const {
  return fmt::format("{}/i{}/t{}/s{}", toString(kind), iteration, sourceTask, sliceIndex);
}

BlockId gradientSliceId(std::int64_t iteration, int sourceTask, int sliceIndex) {
  return {BlockKind::kGradientSlice, iteration, sourceTask, sliceIndex};
}

BlockId weightSliceId(std::int64_t iteration, int sliceIndex) {
  return {BlockKind::kWeightSlice, iteration, sliceIndex, sliceIndex};
}

Blob::Blob() : Blob(fromValues({})) {}

Blob Blob::fromValues(std::span<const double> values) {
  auto bytes = std::make_shared<std::vector<std::byte>>(kHeaderBytes + values.size() * 8);
  storeLe64(bytes->data(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    storeLe64(bytes->data() + kHeaderBytes + 8 * i, std::bit_cast<std::uint64_t>(values[i]));
  }
  return Blob(std::move(bytes));
}

Blob Blob::fromBytes(std::vector<std::byte> bytes) {
  if (bytes.size() < kHeaderBytes) throw InvalidArgument("Blob: missing length header");
  std::uint64_t count = loadLe64(bytes.data());
  if ((bytes.size() - kHeaderBytes) % 8 != 0 || (bytes.size() - kHeaderBytes) / 8 != count) {
    throw InvalidArgument(fmt::format("Blob: header says {} elements but {} payload bytes", count,
                                      bytes.size() - kHeaderBytes));
  }
  return Blob(std::make_shared<const std::vector<std::byte>>(std::move(bytes)));
}

std::size_t Blob::size() const { return static_cast<std::size_t>(loadLe64(bytes_->data())); }

double Blob::at(std::size_t i) const {
  if (i >= size()) throw InvalidArgument("Blob::at: index out of range");
  return std::bit_cast<double>(loadLe64(bytes_->data() + kHeaderBytes + 8 * i));
}

std::vector<double> Blob::values() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::bit_cast<double>(loadLe64(bytes_->data() + kHeaderBytes + 8 * i));
  }
  return out;
}

bool operator==(const Blob& a, const Blob& b) {
  return a.bytes_ == b.bytes_ || std::ranges::equal(*a.bytes_, *b.bytes_);
}

}  // namespace shufflesgd
