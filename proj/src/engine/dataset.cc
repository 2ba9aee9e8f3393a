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

#include "shufflesgd/engine/dataset.h"

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"

namespace shufflesgd {

DatasetEngine::DatasetEngine(int numNodes, NetworkStats* network,
                             const TransformRegistry& registry)
    : numNodes_(numNodes), network_(network), registry_(registry) {
  if (numNodes < 1) throw InvalidArgument("DatasetEngine: numNodes must be positive");
}

DatasetId DatasetEngine::addDataset(int numPartitions, Lineage lineage,
                                    std::vector<NodeId> placement) {
  DatasetId id{static_cast<std::uint32_t>(datasets_.size())};
  datasets_.push_back(std::make_unique<DatasetInfo>(
      DatasetInfo{id, numPartitions, std::move(lineage), std::move(placement), false}));
  return id;
}

DatasetId DatasetEngine::parallelize(std::vector<Record> records, int numPartitions) {
  std::vector<NodeId> placement;
  for (int p = 0; p < std::max(numPartitions, 0); ++p) placement.push_back(p % numNodes_);
  return parallelize(std::move(records), numPartitions, std::move(placement));
}

DatasetId DatasetEngine::parallelize(std::vector<Record> records, int numPartitions,
                                     std::vector<NodeId> placement) {
  if (numPartitions < 1) throw InvalidArgument("parallelize: numPartitions must be >= 1");
  if (records.empty()) throw InvalidArgument("parallelize: record list is empty");
  if (placement.size() != static_cast<std::size_t>(numPartitions)) {
    throw InvalidArgument("parallelize: placement must name one node per partition");
  }
  for (NodeId n : placement) {
    if (n < 0 || n >= numNodes_) {
      throw InvalidArgument(fmt::format("parallelize: node {} out of range", n));
    }
  }
  auto shared = std::make_shared<const std::vector<Record>>(std::move(records));
  return addDataset(numPartitions, SourceLineage{std::move(shared)}, std::move(placement));
}

DatasetId DatasetEngine::mapPartitions(DatasetId parent, const std::string& transformId) {
  if (!registry_.contains(transformId)) {
    throw InvalidArgument(fmt::format("mapPartitions: unknown transform '{}'", transformId));
  }
  const DatasetInfo& p = info(parent);
  return addDataset(p.numPartitions, MapLineage{parent, transformId}, p.placement);
}

DatasetId DatasetEngine::zipPartitions(DatasetId left, DatasetId right) {
  const DatasetInfo& l = info(left);
  const DatasetInfo& r = info(right);
  if (l.numPartitions != r.numPartitions) {
    throw InvalidArgument(fmt::format("zipPartitions: partition counts differ ({} vs {})",
                                      l.numPartitions, r.numPartitions));
  }
  if (l.placement != r.placement) {
    throw InvalidArgument("zipPartitions: datasets are not co-placed");
  }
  return addDataset(l.numPartitions, ZipLineage{left, right}, l.placement);
}

void DatasetEngine::cachePartitions(DatasetId ds) { mutableInfo(ds).cached = true; }

const DatasetInfo& DatasetEngine::info(DatasetId ds) const {
  if (ds.value >= datasets_.size()) {
    throw InvalidArgument(fmt::format("unknown dataset {}", ds.value));
  }
  return *datasets_[ds.value];
}

DatasetInfo& DatasetEngine::mutableInfo(DatasetId ds) {
  return const_cast<DatasetInfo&>(std::as_const(*this).info(ds));
}

NodeId DatasetEngine::placement(DatasetId ds, int index) const {
  const DatasetInfo& i = info(ds);
  if (index < 0 || index >= i.numPartitions) {
    throw InvalidArgument(fmt::format("partition {} out of range for dataset {}", index, ds.value));
  }
  return i.placement[index];
}

Partition DatasetEngine::materialize(DatasetId ds, int index) {
  return materialize(ds, index, placement(ds, index));
}

Partition DatasetEngine::materialize(DatasetId ds, int index, NodeId reader) {
  const DatasetInfo& i = info(ds);
  NodeId home = placement(ds, index);
  PartitionId pid{ds, index};
  if (i.cached) {
    std::unique_lock lock(mu_);
    if (auto it = cache_.find(pid); it != cache_.end()) {
      CachedPartition hit = it->second;
      lock.unlock();
      if (network_ != nullptr && hit.node != reader) {
        network_->recordTransfer(hit.node, reader, hit.data->byteSize(), TrafficPhase::kOther, -1);
      }
      return hit.data;
    }
  }
  Partition data = compute(i, index, reader);
  if (i.cached) {
    std::lock_guard lock(mu_);
    auto [it, inserted] = cache_.try_emplace(pid, CachedPartition{data, home});
    return it->second.data;
  }
  return data;
}

Partition DatasetEngine::recomputePartition(DatasetId ds, int index) {
  placement(ds, index);  // range check
  return compute(info(ds), index, placement(ds, index));
}

Partition DatasetEngine::compute(const DatasetInfo& i, int index, NodeId reader) {
  Partition out = std::visit(
      [&](const auto& lineage) -> Partition {
        using L = std::decay_t<decltype(lineage)>;
        if constexpr (std::is_same_v<L, SourceLineage>) {
          std::vector<Record> records;
          const auto& all = *lineage.records;
          for (std::size_t r = index; r < all.size(); r += i.numPartitions) {
            records.push_back(all[r]);
          }
          return std::make_shared<const PartitionData>(std::move(records));
        } else if constexpr (std::is_same_v<L, MapLineage>) {
          Partition parent = materialize(lineage.parent, index, reader);
          return std::make_shared<const PartitionData>(
              registry_.apply(lineage.transformId, *parent));
        } else {
          Partition left = materialize(lineage.left, index, reader);
          Partition right = materialize(lineage.right, index, reader);
          return std::make_shared<const PartitionData>(std::move(left), std::move(right));
        }
      },
      i.lineage);
  std::lock_guard lock(mu_);
  ++computeCounts_[PartitionId{i.id, index}];
  return out;
}

void DatasetEngine::dropCached(DatasetId ds, int index) {
  std::lock_guard lock(mu_);
  cache_.erase(PartitionId{ds, index});
}

void DatasetEngine::killWorker(NodeId node) {
  std::lock_guard lock(mu_);
  std::erase_if(cache_, [&](const auto& kv) { return kv.second.node == node; });
}

std::uint64_t DatasetEngine::computeCount(DatasetId ds, int index) const {
  std::lock_guard lock(mu_);
  auto it = computeCounts_.find(PartitionId{ds, index});
  return it == computeCounts_.end() ? 0 : it->second;
}

}  // namespace shufflesgd
