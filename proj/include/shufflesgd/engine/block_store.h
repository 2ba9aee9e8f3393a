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
#include <map>
#include <optional>
#include <shared_mutex>

#include "shufflesgd/engine/block.h"
#include "shufflesgd/sim/network_stats.h"

namespace shufflesgd {

// Write-once in-memory block store shared by all simulated nodes. It carries
// gradient slices (the shuffle) and updated weight slices (the task-side
// broadcast) between jobs.
//
// Remote reads are booked in NetworkStats by element payload size: gradient
// slices as shuffle traffic and weight slices as broadcast traffic, attributed
// to the iteration that produced the block. The 8-byte blob header is framing
// and is not counted.
class BlockStore {
 public:
  enum class PutOutcome { kInserted, kDuplicate };

  struct Read {
    Blob blob;
    std::uint64_t remoteBytes = 0;
  };

  explicit BlockStore(NetworkStats* network = nullptr) : network_(network) {}

  BlockStore(const BlockStore&) = delete;
  BlockStore& operator=(const BlockStore&) = delete;

  // Re-putting identical bytes is a no-op so re-executed tasks are harmless;
  // different bytes throw DeterminismViolation.
  PutOutcome put(const BlockId& id, Blob blob, NodeId producer);

  // Throws SequencingError when the block is absent.
  Read get(const BlockId& id, NodeId consumer) const;

  // Driver-side read with no transfer accounting.
  std::optional<Blob> peek(const BlockId& id) const;
  std::optional<NodeId> residency(const BlockId& id) const;
  bool contains(const BlockId& id) const;
  std::size_t size() const;

  // Drops every block whose iteration is below `iteration`; returns the count.
  std::size_t evictBefore(std::int64_t iteration);

  std::map<BlockId, Blob> snapshot() const;

 private:
  struct Entry {
    Blob blob;
    NodeId producer;
  };

  NetworkStats* network_;
  mutable std::shared_mutex mu_;
  std::map<BlockId, Entry> entries_;
};

}  // namespace shufflesgd
