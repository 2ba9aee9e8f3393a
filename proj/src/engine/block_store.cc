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

#include "shufflesgd/engine/block_store.h"

#include <mutex>

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"

namespace shufflesgd {

BlockStore::PutOutcome BlockStore::put(const BlockId& id, Blob blob, NodeId producer) {
  std::unique_lock lock(mu_);
  auto [it, inserted] = entries_.try_emplace(id, Entry{blob, producer});
  if (inserted) return PutOutcome::kInserted;
  if (!(it->second.blob == blob)) {
    throw DeterminismViolation(
        fmt::format("block {} re-put with different bytes (node {} vs original node {})", id.str(),
                    producer, it->second.producer));
  }
  return PutOutcome::kDuplicate;
}

BlockStore::Read BlockStore::get(const BlockId& id, NodeId consumer) const {
  Entry entry;
  {
    std::shared_lock lock(mu_);
    auto it = entries_.find(id);
    if (it == entries_.end()) {
      throw SequencingError(fmt::format("block {} requested by node {} does not exist", id.str(),
                                        consumer));
    }
    entry = it->second;
  }
  Read read{entry.blob, 0};
  if (entry.producer != consumer) {
    read.remoteBytes = entry.blob.payloadBytes();
    if (network_ != nullptr) {
      auto phase = id.kind == BlockKind::kGradientSlice ? TrafficPhase::kShuffle
                                                        : TrafficPhase::kBroadcast;
      network_->recordTransfer(entry.producer, consumer, read.remoteBytes, phase, id.iteration);
    }
  }
  return read;
}

std::optional<Blob> BlockStore::peek(const BlockId& id) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second.blob;
}

std::optional<NodeId> BlockStore::residency(const BlockId& id) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second.producer;
}

bool BlockStore::contains(const BlockId& id) const {
  std::shared_lock lock(mu_);
  return entries_.contains(id);
}

std::size_t BlockStore::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::size_t BlockStore::evictBefore(std::int64_t iteration) {
  std::unique_lock lock(mu_);
  return std::erase_if(entries_, [&](const auto& kv) { return kv.first.iteration < iteration; });
}

std::map<BlockId, Blob> BlockStore::snapshot() const {
  std::shared_lock lock(mu_);
  std::map<BlockId, Blob> out;
  for (const auto& [id, e] : entries_) out.emplace(id, e.blob);
  return out;
}

}  // namespace shufflesgd
