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

#include "shufflesgd/train/batch.h"

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"
#include "shufflesgd/common/philox.h"

namespace shufflesgd {

std::vector<std::size_t> sampleBatchIndices(std::uint64_t seed, int task, std::int64_t iteration,
                                            std::size_t partitionSize, int batchSize) {
  if (partitionSize == 0) {
    throw InvalidArgument(fmt::format("task {}: cannot sample from an empty partition", task));
  }
  if (batchSize < 1) throw InvalidArgument("batch size must be >= 1");
  if (task < 0 || iteration < 0 || iteration > 0xffffffffLL) {
    throw InvalidArgument("batch stream key out of range");
  }
  CounterRng rng(seed, RngPurpose::kBatch, static_cast<std::uint32_t>(task),
                 static_cast<std::uint32_t>(iteration));
  std::vector<std::size_t> out(static_cast<std::size_t>(batchSize));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = rng.below(k, partitionSize);
  return out;
}

Batch makeBatch(std::span<const Record> records, std::span<const std::size_t> indices,
                std::size_t inputWidth, std::size_t targetWidth) {
  const std::size_t width = inputWidth + targetWidth;
  std::vector<double> in;
  std::vector<double> tgt;
  in.reserve(indices.size() * inputWidth);
  tgt.reserve(indices.size() * targetWidth);
  for (std::size_t idx : indices) {
    if (idx >= records.size()) {
      throw InvalidArgument(fmt::format("batch index {} outside partition of {}", idx,
                                        records.size()));
    }
    const Record& r = records[idx];
    if (r.size() != width) {
      throw ShapeError(fmt::format("record of width {}, expected {} inputs + {} targets",
                                   r.size(), inputWidth, targetWidth));
    }
    in.insert(in.end(), r.begin(), r.begin() + static_cast<std::ptrdiff_t>(inputWidth));
    tgt.insert(tgt.end(), r.begin() + static_cast<std::ptrdiff_t>(inputWidth), r.end());
  }
  return Batch{nn::Tensor::matrix(indices.size(), inputWidth, std::move(in)),
               nn::Tensor::matrix(indices.size(), targetWidth, std::move(tgt))};
}

std::vector<Record> roundRobinPartition(std::span<const Record> records, int numPartitions,
                                        int index) {
  if (numPartitions < 1 || index < 0 || index >= numPartitions) {
    throw InvalidArgument("round-robin partition index out of range");
  }
  std::vector<Record> out;
  for (std::size_t r = static_cast<std::size_t>(index); r < records.size();
       r += static_cast<std::size_t>(numPartitions)) {
    out.push_back(records[r]);
  }
  return out;
}

}  // namespace shufflesgd
