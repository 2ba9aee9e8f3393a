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
#include <mutex>
#include <string_view>
#include <tuple>
#include <vector>

namespace shufflesgd {

using NodeId = int;

enum class TrafficPhase : std::uint8_t { kShuffle, kBroadcast, kOther };

std::string_view toString(TrafficPhase phase);

// Byte-volume accounting between simulated nodes. Bandwidth is not modeled.
// Thread-safe; every transfer is booked as outbound on the producer and
// inbound on the consumer, so the two global sums always agree.
class NetworkStats {
 public:
  struct Counters {
    std::uint64_t inbound = 0;
    std::uint64_t outbound = 0;
  };

  struct Row {
    std::int64_t iteration;
    TrafficPhase phase;
    NodeId node;
    Counters bytes;
  };

  explicit NetworkStats(int numNodes);

  // Local transfers (from == to) are not recorded.
  void recordTransfer(NodeId from, NodeId to, std::uint64_t bytes, TrafficPhase phase,
                      std::int64_t iteration);

  int numNodes() const { return numNodes_; }
  Counters node(NodeId node) const;
  Counters node(NodeId node, std::int64_t iteration) const;
  Counters node(NodeId node, std::int64_t iteration, TrafficPhase phase) const;
  std::uint64_t totalInbound() const;
  std::uint64_t totalOutbound() const;

  // Sorted by (iteration, phase, node).
  std::vector<Row> rows() const;
  void reset();

 private:
  using Key = std::tuple<std::int64_t, TrafficPhase, NodeId>;

  void checkNode(NodeId node) const;

  int numNodes_;
  mutable std::mutex mu_;
  std::map<Key, Counters> cells_;
};

}  // namespace shufflesgd
