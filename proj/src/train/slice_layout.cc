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

#include "shufflesgd/train/slice_layout.h"

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"

namespace shufflesgd {

SliceLayout::SliceLayout(std::size_t totalParams, int numSlices) {
  if (numSlices < 1) throw InvalidArgument("SliceLayout needs at least one slice");
  const std::size_t n = static_cast<std::size_t>(numSlices);
  const std::size_t base = totalParams / n;
  const std::size_t extra = totalParams % n;
  offsets_.reserve(n + 1);
  offsets_.push_back(0);
  for (std::size_t s = 0; s < n; ++s) offsets_.push_back(offsets_.back() + base + (s < extra));
}

void SliceLayout::checkSlice(int slice) const {
  if (slice < 0 || slice >= numSlices()) {
    throw InvalidArgument(fmt::format("slice {} outside [0, {})", slice, numSlices()));
  }
}

std::size_t SliceLayout::offset(int slice) const {
  checkSlice(slice);
  return offsets_[slice];
}

std::size_t SliceLayout::size(int slice) const {
  checkSlice(slice);
  return offsets_[slice + 1] - offsets_[slice];
}

std::span<const double> SliceLayout::slice(std::span<const double> values, int slice) const {
  if (values.size() != totalParams()) {
    throw ShapeError(fmt::format("vector of {} values for a layout of {}", values.size(),
                                 totalParams()));
  }
  return values.subspan(offset(slice), size(slice));
}

std::span<double> SliceLayout::slice(std::span<double> values, int slice) const {
  if (values.size() != totalParams()) {
    throw ShapeError(fmt::format("vector of {} values for a layout of {}", values.size(),
                                 totalParams()));
  }
  return values.subspan(offset(slice), size(slice));
}

}  // namespace shufflesgd
