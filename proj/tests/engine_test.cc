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

#include <algorithm>
#include <atomic>
#include <thread>

#include <gtest/gtest.h>

#include "shufflesgd/common/errors.h"
#include "shufflesgd/engine/block_store.h"
#include "shufflesgd/engine/dataset.h"

namespace shufflesgd {
namespace {

std::vector<Record> numbered(int n) {
  std::vector<Record> out;
  for (int i = 0; i < n; ++i) out.push_back({static_cast<double>(i)});
  return out;
}

std::vector<double> firstColumn(const Partition& p) {
  std::vector<double> out;
  for (const Record& r : p->records()) out.push_back(r.at(0));
  return out;
}

class DatasetTest : public ::testing::Test {
 protected:
  DatasetTest() {
    registry_.add("identity", [](const PartitionData& p) {
      return std::vector<Record>(p.records().begin(), p.records().end());
    });
    registry_.add("double", [](const PartitionData& p) {
      std::vector<Record> out(p.records().begin(), p.records().end());
      for (Record& r : out) {
        for (double& v : r) v *= 2;
      }
      return out;
    });
  }

  TransformRegistry registry_;
  NetworkStats network_{4};
  DatasetEngine engine_{4, &network_, registry_};
};

TEST_F(DatasetTest, ParallelizeRoundRobin) {
  DatasetId ds = engine_.parallelize(numbered(8), 4);
  for (int p = 0; p < 4; ++p) {
    EXPECT_EQ(firstColumn(engine_.materialize(ds, p)),
              (std::vector<double>{static_cast<double>(p), static_cast<double>(p + 4)}));
  }
}

TEST_F(DatasetTest, ParallelizeSinglePartitionKeepsOrder) {
  DatasetId ds = engine_.parallelize(numbered(8), 1);
  EXPECT_EQ(firstColumn(engine_.materialize(ds, 0)),
            (std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7}));
}

TEST_F(DatasetTest, ParallelizeUnevenSizes) {
  DatasetId ds = engine_.parallelize(numbered(10), 3);
  EXPECT_EQ(engine_.materialize(ds, 0)->records().size(), 4u);
  EXPECT_EQ(engine_.materialize(ds, 1)->records().size(), 3u);
  EXPECT_EQ(engine_.materialize(ds, 2)->records().size(), 3u);
}

TEST_F(DatasetTest, ParallelizeErrors) {
  EXPECT_THROW(engine_.parallelize(numbered(4), 0), InvalidArgument);
  EXPECT_THROW(engine_.parallelize({}, 2), InvalidArgument);
  EXPECT_THROW(engine_.parallelize(numbered(4), 2, {0, 9}), InvalidArgument);
}

TEST_F(DatasetTest, DefaultPlacementIsModuloNodes) {
  DatasetId ds = engine_.parallelize(numbered(12), 6);
  for (int p = 0; p < 6; ++p) EXPECT_EQ(engine_.placement(ds, p), p % 4);
}

TEST_F(DatasetTest, IdentityMapIsByteIdentical) {
  DatasetId ds = engine_.parallelize(numbered(9), 3);
  DatasetId mapped = engine_.mapPartitions(ds, "identity");
  for (int p = 0; p < 3; ++p) {
    EXPECT_EQ(engine_.materialize(mapped, p)->serialize(), engine_.materialize(ds, p)->serialize());
  }
}

TEST_F(DatasetTest, MapComposes) {
  DatasetId ds = engine_.parallelize(numbered(6), 2);
  DatasetId twice = engine_.mapPartitions(engine_.mapPartitions(ds, "double"), "double");
  EXPECT_EQ(firstColumn(engine_.materialize(twice, 1)), (std::vector<double>{4, 12, 20}));
  // The parent is untouched.
  EXPECT_EQ(firstColumn(engine_.materialize(ds, 1)), (std::vector<double>{1, 3, 5}));
}

TEST_F(DatasetTest, UnknownTransformRejected) {
  DatasetId ds = engine_.parallelize(numbered(4), 2);
  EXPECT_THROW(engine_.mapPartitions(ds, "no-such-transform"), InvalidArgument);
}

TEST_F(DatasetTest, RecomputeAfterDropMatchesOriginal) {
  DatasetId ds = engine_.mapPartitions(engine_.parallelize(numbered(12), 4), "double");
  engine_.cachePartitions(ds);
  auto original = engine_.materialize(ds, 2)->serialize();
  engine_.dropCached(ds, 2);
  EXPECT_EQ(engine_.materialize(ds, 2)->serialize(), original);
  EXPECT_EQ(engine_.recomputePartition(ds, 2)->serialize(), original);
  EXPECT_EQ(engine_.computeCount(ds, 2), 3u);
}

TEST_F(DatasetTest, CacheHitSkipsTransform) {
  DatasetId ds = engine_.mapPartitions(engine_.parallelize(numbered(8), 4), "double");
  engine_.cachePartitions(ds);
  for (int round = 0; round < 2; ++round) {
    for (int p = 0; p < 4; ++p) engine_.materialize(ds, p);
  }
  EXPECT_EQ(registry_.invocations("double"), 4u);
}

TEST_F(DatasetTest, NoCacheRecomputesEveryTime) {
  DatasetId ds = engine_.mapPartitions(engine_.parallelize(numbered(8), 4), "double");
  for (int round = 0; round < 2; ++round) {
    for (int p = 0; p < 4; ++p) engine_.materialize(ds, p);
  }
  EXPECT_EQ(registry_.invocations("double"), 8u);
}

TEST_F(DatasetTest, KillWorkerRecomputesOnlyItsPartitions) {
  DatasetId ds = engine_.mapPartitions(engine_.parallelize(numbered(8), 4), "double");
  engine_.cachePartitions(ds);
  for (int p = 0; p < 4; ++p) engine_.materialize(ds, p);
  engine_.killWorker(3);
  for (int p = 0; p < 4; ++p) engine_.materialize(ds, p);
  EXPECT_EQ(registry_.invocations("double"), 5u);
  for (int p = 0; p < 3; ++p) EXPECT_EQ(engine_.computeCount(ds, p), 1u);
  EXPECT_EQ(engine_.computeCount(ds, 3), 2u);
}

TEST_F(DatasetTest, ZipPairsCoPlacedPartitionsWithoutTransfer) {
  DatasetId models = engine_.parallelize(numbered(4), 4);
  DatasetId samples = engine_.parallelize(numbered(16), 4);
  engine_.cachePartitions(models);
  engine_.cachePartitions(samples);
  DatasetId zipped = engine_.zipPartitions(models, samples);
  for (int p = 0; p < 4; ++p) {
    Partition z = engine_.materialize(zipped, p, engine_.placement(zipped, p));
    ASSERT_TRUE(z->zipped());
    EXPECT_EQ(z->left().records().size(), 1u);
    EXPECT_EQ(z->right().records().size(), 4u);
    EXPECT_EQ(z->left().records()[0][0], p);
  }
  EXPECT_EQ(network_.totalOutbound(), 0u);
  EXPECT_EQ(network_.totalInbound(), 0u);
}

TEST_F(DatasetTest, SelfZip) {
  DatasetId ds = engine_.parallelize(numbered(6), 3);
  Partition z = engine_.materialize(engine_.zipPartitions(ds, ds), 1);
  EXPECT_EQ(z->left().serialize(), z->right().serialize());
}

TEST_F(DatasetTest, ZipErrors) {
  DatasetId four = engine_.parallelize(numbered(8), 4);
  DatasetId three = engine_.parallelize(numbered(8), 3);
  EXPECT_THROW(engine_.zipPartitions(four, three), InvalidArgument);
  DatasetId moved = engine_.parallelize(numbered(8), 4, {1, 2, 3, 0});
  EXPECT_THROW(engine_.zipPartitions(four, moved), InvalidArgument);
}

TEST_F(DatasetTest, RemoteCacheReadIsAccounted) {
  DatasetId ds = engine_.parallelize(numbered(8), 4);
  engine_.cachePartitions(ds);
  Partition home = engine_.materialize(ds, 1);
  EXPECT_EQ(network_.totalOutbound(), 0u);
  engine_.materialize(ds, 1, 2);
  EXPECT_EQ(network_.node(1).outbound, home->byteSize());
  EXPECT_EQ(network_.node(2).inbound, home->byteSize());
}

// Property: every materialization route agrees with a fresh replay of the
// lineage, for a family of pipelines.
TEST_F(DatasetTest, LineageDeterminismProperty) {
  for (int n = 1; n <= 6; ++n) {
    for (int size : {n, 2 * n + 1, 17}) {
      DatasetId base = engine_.parallelize(numbered(size), n);
      DatasetId mapped = engine_.mapPartitions(base, "double");
      DatasetId zipped = engine_.zipPartitions(mapped, base);
      engine_.cachePartitions(mapped);
      for (int p = 0; p < n; ++p) {
        auto first = engine_.materialize(zipped, p)->serialize();
        engine_.killWorker(engine_.placement(mapped, p));
        EXPECT_EQ(engine_.recomputePartition(zipped, p)->serialize(), first);
        EXPECT_EQ(engine_.materialize(zipped, p)->serialize(), first);
      }
    }
  }
}

TEST(TransformRegistry, DuplicateAndUnknownIds) {
  TransformRegistry r;
  r.add("t", [](const PartitionData&) { return std::vector<Record>{}; });
  EXPECT_TRUE(r.contains("t"));
  EXPECT_THROW(r.add("t", [](const PartitionData&) { return std::vector<Record>{}; }),
               InvalidArgument);
  EXPECT_THROW(r.apply("u", PartitionData({})), InvalidArgument);
}

TEST(Blob, RoundTripsValues) {
  const double v[] = {1.5, -2.0, 0.0};
  Blob b = Blob::fromValues(v);
  EXPECT_EQ(b.size(), 3u);
  EXPECT_EQ(b.payloadBytes(), 24u);
  EXPECT_EQ(b.bytes().size(), 32u);
  EXPECT_EQ(b.values(), (std::vector<double>{1.5, -2.0, 0.0}));
  EXPECT_EQ(static_cast<unsigned>(b.bytes()[0]), 3u);  // little-endian count
  Blob copy = Blob::fromBytes({b.bytes().begin(), b.bytes().end()});
  EXPECT_EQ(copy, b);
}

TEST(Blob, RejectsBadHeader) {
  EXPECT_THROW(Blob::fromBytes(std::vector<std::byte>(4)), InvalidArgument);
  std::vector<std::byte> bytes(16);
  bytes[0] = std::byte{2};  // claims two values, carries one
  EXPECT_THROW(Blob::fromBytes(bytes), InvalidArgument);
}

TEST(BlockId, WeightSliceOwnedBySliceTask) {
  BlockId w = weightSliceId(3, 2);
  EXPECT_EQ(w.kind, BlockKind::kWeightSlice);
  EXPECT_EQ(w.sourceTask, 2);
  EXPECT_EQ(w.sliceIndex, 2);
  EXPECT_NE(gradientSliceId(3, 2, 2), w);
}

TEST(BlockStore, PutThenGet) {
  BlockStore store;
  const double v[] = {1, 2};
  store.put(gradientSliceId(0, 0, 0), Blob::fromValues(v), 0);
  EXPECT_EQ(store.get(gradientSliceId(0, 0, 0), 0).blob.values(), (std::vector<double>{1, 2}));
}

TEST(BlockStore, IdempotentRePut) {
  BlockStore store;
  const double v[] = {1, 2};
  EXPECT_EQ(store.put(weightSliceId(0, 1), Blob::fromValues(v), 1),
            BlockStore::PutOutcome::kInserted);
  EXPECT_EQ(store.put(weightSliceId(0, 1), Blob::fromValues(v), 1),
            BlockStore::PutOutcome::kDuplicate);
  EXPECT_EQ(store.size(), 1u);
}

TEST(BlockStore, ConflictingRePutIsDeterminismViolation) {
  BlockStore store;
  const double a[] = {1, 2};
  const double b[] = {1, 3};
  store.put(weightSliceId(0, 1), Blob::fromValues(a), 1);
  EXPECT_THROW(store.put(weightSliceId(0, 1), Blob::fromValues(b), 1), DeterminismViolation);
  EXPECT_EQ(store.get(weightSliceId(0, 1), 1).blob.values(), (std::vector<double>{1, 2}));
}

TEST(BlockStore, MissingBlockIsSequencingError) {
  BlockStore store;
  EXPECT_THROW(store.get(gradientSliceId(0, 0, 0), 0), SequencingError);
}

TEST(BlockStore, LocalReadRecordsNothingRemoteReadRecordsPayload) {
  NetworkStats net(4);
  BlockStore store(&net);
  std::vector<double> v(128, 1.0);  // 1024 payload bytes
  store.put(gradientSliceId(5, 1, 2), Blob::fromValues(v), 1);
  EXPECT_EQ(store.get(gradientSliceId(5, 1, 2), 1).remoteBytes, 0u);
  EXPECT_EQ(net.totalOutbound(), 0u);
  EXPECT_EQ(store.get(gradientSliceId(5, 1, 2), 2).remoteBytes, 1024u);
  EXPECT_EQ(net.node(1, 5, TrafficPhase::kShuffle).outbound, 1024u);
  EXPECT_EQ(net.node(2, 5, TrafficPhase::kShuffle).inbound, 1024u);
}

// N = 4 sync tasks each read the three remote gradient slices for their own
// slice index: 3s bytes inbound per node.
TEST(BlockStore, ShuffleInboundPerNode) {
  const int n = 4;
  const std::size_t s = 5;
  NetworkStats net(n);
  BlockStore store(&net);
  std::vector<double> slice(s, 0.25);
  for (int t = 0; t < n; ++t) {
    for (int k = 0; k < n; ++k) store.put(gradientSliceId(0, t, k), Blob::fromValues(slice), t);
  }
  for (int k = 0; k < n; ++k) {
    for (int t = 0; t < n; ++t) store.get(gradientSliceId(0, t, k), k);
  }
  for (int node = 0; node < n; ++node) {
    EXPECT_EQ(net.node(node).inbound, 3 * s * 8);
    EXPECT_EQ(net.node(node).outbound, 3 * s * 8);
  }
}

TEST(BlockStore, EvictionKeepsRecentIterations) {
  BlockStore store;
  const double v[] = {0};
  for (int i = 0; i < 5; ++i) store.put(weightSliceId(i, 0), Blob::fromValues(v), 0);
  // At the start of iteration 4, iterations 3 and 4 must survive.
  EXPECT_EQ(store.evictBefore(4 - 1), 3u);
  EXPECT_FALSE(store.contains(weightSliceId(2, 0)));
  EXPECT_TRUE(store.contains(weightSliceId(3, 0)));
  EXPECT_TRUE(store.contains(weightSliceId(4, 0)));
}

TEST(BlockStore, ConcurrentIdempotentPutsKeepOneValue) {
  BlockStore store;
  std::vector<double> v(64, 3.0);
  std::atomic<int> inserted{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int k = 0; k < 50; ++k) {
        if (store.put(gradientSliceId(0, 0, k), Blob::fromValues(v), 0) ==
            BlockStore::PutOutcome::kInserted) {
          ++inserted;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(inserted.load(), 50);
  EXPECT_EQ(store.size(), 50u);
}

TEST(NetworkStats, ConservationAndLocalSkip) {
  NetworkStats net(3);
  net.recordTransfer(0, 1, 10, TrafficPhase::kShuffle, 0);
  net.recordTransfer(1, 2, 7, TrafficPhase::kBroadcast, 1);
  net.recordTransfer(2, 2, 99, TrafficPhase::kOther, 1);
  EXPECT_EQ(net.totalInbound(), 17u);
  EXPECT_EQ(net.totalOutbound(), 17u);
  EXPECT_EQ(net.node(1).inbound, 10u);
  EXPECT_EQ(net.node(1).outbound, 7u);
  EXPECT_EQ(net.rows().size(), 4u);
  EXPECT_THROW(net.recordTransfer(0, 3, 1, TrafficPhase::kOther, 0), InvalidArgument);
}

}  // namespace
}  // namespace shufflesgd
