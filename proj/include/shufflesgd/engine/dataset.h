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
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "shufflesgd/engine/transform_registry.h"
#include "shufflesgd/sim/network_stats.h"

namespace shufflesgd {

struct DatasetId {
  std::uint32_t value = 0;
  auto operator<=>(const DatasetId&) const = default;
};

struct PartitionId {
  DatasetId dataset;
  int index = 0;
  auto operator<=>(const PartitionId&) const = default;
};

struct SourceLineage {
  std::shared_ptr<const std::vector<Record>> records;  // round-robin partitioned
};

struct MapLineage {
  DatasetId parent;
  std::string transformId;
};

struct ZipLineage {
  DatasetId left;
  DatasetId right;
};

using Lineage = std::variant<SourceLineage, MapLineage, ZipLineage>;

struct DatasetInfo {
  DatasetId id;
  int numPartitions = 0;
  Lineage lineage;
  std::vector<NodeId> placement;  // partition index -> node
  bool cached = false;
};

// A miniature RDD engine. Datasets are immutable and carry their lineage;
// transformations return new datasets and are evaluated lazily, a whole
// partition at a time, when a task materializes a partition.
//
// Dataset metadata is built by the driver thread only. materialize() may be
// called concurrently from tasks.
class DatasetEngine {
 public:
  explicit DatasetEngine(int numNodes, NetworkStats* network = nullptr,
                         const TransformRegistry& registry = TransformRegistry::global());

  DatasetEngine(const DatasetEngine&) = delete;
  DatasetEngine& operator=(const DatasetEngine&) = delete;

  // Record r goes to partition r mod numPartitions; partition p is placed on
  // node p mod numNodes unless a placement is given.
  DatasetId parallelize(std::vector<Record> records, int numPartitions);
  DatasetId parallelize(std::vector<Record> records, int numPartitions,
                        std::vector<NodeId> placement);

  DatasetId mapPartitions(DatasetId parent, const std::string& transformId);
  // Pairs partition p of `left` with partition p of `right`. Both must have
  // the same partition count and placement.
  DatasetId zipPartitions(DatasetId left, DatasetId right);

  void cachePartitions(DatasetId ds);

  // Returns partition `index`, reading the cache when possible and otherwise
  // replaying lineage. Reading a cached partition from another node books its
  // serialized size as kOther traffic.
  Partition materialize(DatasetId ds, int index, NodeId reader);
  Partition materialize(DatasetId ds, int index);
  // Lineage replay that bypasses (and does not populate) this dataset's cache.
  Partition recomputePartition(DatasetId ds, int index);

  void dropCached(DatasetId ds, int index);
  // Loses every cached partition held by `node`.
  void killWorker(NodeId node);

  const DatasetInfo& info(DatasetId ds) const;
  int numPartitions(DatasetId ds) const { return info(ds).numPartitions; }
  NodeId placement(DatasetId ds, int index) const;
  int numNodes() const { return numNodes_; }

  // How many times partition (ds, index) was computed from lineage.
  std::uint64_t computeCount(DatasetId ds, int index) const;

 private:
  DatasetId addDataset(int numPartitions, Lineage lineage, std::vector<NodeId> placement);
  Partition compute(const DatasetInfo& info, int index, NodeId reader);
  DatasetInfo& mutableInfo(DatasetId ds);

  int numNodes_;
  NetworkStats* network_;
  const TransformRegistry& registry_;
  std::vector<std::unique_ptr<DatasetInfo>> datasets_;

  struct CachedPartition {
    Partition data;
    NodeId node;
  };
  mutable std::mutex mu_;
  std::map<PartitionId, CachedPartition> cache_;
  std::map<PartitionId, std::uint64_t> computeCounts_;
};

}  // namespace shufflesgd
