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

#include <cstdint>
#include <span>
#include <vector>

#include "shufflesgd/engine/transform_registry.h"
#include "shufflesgd/nn/tensor.h"

namespace shufflesgd {

// B indices into a partition of the given size, drawn with replacement from
// the stream keyed by (seed, task, iteration). Throws on an empty partition.
std::vector<std::size_t> sampleBatchIndices(std::uint64_t seed, int task, std::int64_t iteration,
                                            std::size_t partitionSize, int batchSize);

struct Batch {
  nn::Tensor inputs;
  nn::Tensor targets;
};

// Splits the selected [inputs..., targets...] records into two matrices.
Batch makeBatch(std::span<const Record> records, std::span<const std::size_t> indices,
                std::size_t inputWidth, std::size_t targetWidth);

// Partition n of a round-robin split: records n, n + N, n + 2N, ...
std::vector<Record> roundRobinPartition(std::span<const Record> records, int numPartitions,
                                        int index);

}  // namespace shufflesgd
