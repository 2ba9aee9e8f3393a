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

#include "shufflesgd/sim/network_stats.h"

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"

namespace shufflesgd {

std::string_view toString(TrafficPhase phase) {
  switch (phase) {
    case TrafficPhase::kShuffle:
      return "shuffle";
    case TrafficPhase::kBroadcast:
      return "broadcast";
    case TrafficPhase::kOther:
      return "other";
  }
  return "?";
}

NetworkStats::NetworkStats(int numNodes) : numNodes_(numNodes) {
  if (numNodes < 1) throw InvalidArgument("NetworkStats: numNodes must be positive");
}

void NetworkStats::checkNode(NodeId node) const {
  if (node < 0 || node >= numNodes_) {
    throw InvalidArgument(fmt::format("NetworkStats: node {} out of range [0, {})", node, numNodes_));
  }
}

void NetworkStats::recordTransfer(NodeId from, NodeId to, std::uint64_t bytes, TrafficPhase phase,
                                  std::int64_t iteration) {
  checkNode(from);
  checkNode(to);
  if (from == to || bytes == 0) return;
  std::lock_guard lock(mu_);
  cells_[{iteration, phase, from}].outbound += bytes;
  cells_[{iteration, phase, to}].inbound += bytes;
}

NetworkStats::Counters NetworkStats::node(NodeId node) const {
  checkNode(node);
  std::lock_guard lock(mu_);
  Counters sum;
  for (const auto& [key, c] : cells_) {
    if (std::get<2>(key) == node) {
      sum.inbound += c.inbound;
      sum.outbound += c.outbound;
    }
  }
  return sum;
}

NetworkStats::Counters NetworkStats::node(NodeId node, std::int64_t iteration) const {
  checkNode(node);
  std::lock_guard lock(mu_);
  Counters sum;
  for (const auto& [key, c] : cells_) {
    if (std::get<0>(key) == iteration && std::get<2>(key) == node) {
      sum.inbound += c.inbound;
      sum.outbound += c.outbound;
    }
  }
  return sum;
}

NetworkStats::Counters NetworkStats::node(NodeId node, std::int64_t iteration,
                                          TrafficPhase phase) const {
  checkNode(node);
  std::lock_guard lock(mu_);
  auto it = cells_.find({iteration, phase, node});
  return it == cells_.end() ? Counters{} : it->second;
}

std::uint64_t NetworkStats::totalInbound() const {
  std::lock_guard lock(mu_);
  std::uint64_t sum = 0;
  for (const auto& [key, c] : cells_) sum += c.inbound;
  return sum;
}

std::uint64_t NetworkStats::totalOutbound() const {
  std::lock_guard lock(mu_);
  std::uint64_t sum = 0;
  for (const auto& [key, c] : cells_) sum += c.outbound;
  return sum;
}

std::vector<NetworkStats::Row> NetworkStats::rows() const {
  std::lock_guard lock(mu_);
  std::vector<Row> out;
  out.reserve(cells_.size());
  for (const auto& [key, c] : cells_) {
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), c});
  }
  return out;
}

void NetworkStats::reset() {
  std::lock_guard lock(mu_);
  cells_.clear();
}

}  // namespace shufflesgd
