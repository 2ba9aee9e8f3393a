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

#include <cstddef>
#include <span>
#include <vector>

namespace shufflesgd {

// Contiguous balanced split of K parameters into N slices: the first K mod N
// slices hold one extra element. Slices may be empty when K < N.
class SliceLayout {
 public:
  SliceLayout(std::size_t totalParams, int numSlices);

  std::size_t totalParams() const { return offsets_.back(); }
  int numSlices() const { return static_cast<int>(offsets_.size()) - 1; }
  std::size_t offset(int slice) const;
  std::size_t size(int slice) const;
  const std::vector<std::size_t>& offsets() const { return offsets_; }

  std::span<const double> slice(std::span<const double> values, int slice) const;
  std::span<double> slice(std::span<double> values, int slice) const;

 private:
  void checkSlice(int slice) const;

  std::vector<std::size_t> offsets_;  // N + 1 boundaries
};

}  // namespace shufflesgd
