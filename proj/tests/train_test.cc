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

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "shufflesgd/bench/workloads.h"
#include "shufflesgd/common/errors.h"
#include "shufflesgd/nn/model.h"
#include "shufflesgd/nn/optim.h"
#include "shufflesgd/train/batch.h"
#include "shufflesgd/train/tasks.h"
#include "shufflesgd/train/trainer.h"

namespace shufflesgd {
namespace {

using bench::WorkloadKind;

TrainingConfig configFor(const bench::Workload& w, int n, std::int64_t iterations, int batch,
                         double lr, std::uint64_t seed = 1) {
  TrainingConfig c;
  c.numPartitions = n;
  c.iterations = iterations;
  c.perTaskBatch = batch;
  c.learningRate = lr;
  c.seed = seed;
  c.modelSpec = w.spec;
  c.loss = w.loss;
  return c;
}

double maxAbsDiff(const std::vector<double>& a, const std::vector<double>& b) {
  EXPECT_EQ(a.size(), b.size());
  double d = 0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::fabs(a[j] - b[j]));
  return d;
}

TEST(SliceLayout, BalancedRemainder) {
  SliceLayout l(10, 4);
  EXPECT_EQ(l.offsets(), (std::vector<std::size_t>{0, 3, 6, 8, 10}));
  EXPECT_EQ(l.size(0), 3u);
  EXPECT_EQ(l.size(3), 2u);
}

TEST(SliceLayout, SingleSliceAndTinyModels) {
  EXPECT_EQ(SliceLayout(7, 1).size(0), 7u);
  SliceLayout tiny(2, 4);
  EXPECT_EQ(tiny.offsets(), (std::vector<std::size_t>{0, 1, 2, 2, 2}));
  EXPECT_THROW(SliceLayout(3, 0), InvalidArgument);
  EXPECT_THROW(tiny.size(4), InvalidArgument);
}

// Property: slices tile [0, K) contiguously and differ in size by at most one.
TEST(SliceLayout, TilesAndBalancesProperty) {
  for (std::size_t k = 0; k <= 60; ++k) {
    for (int n = 1; n <= 17; ++n) {
      SliceLayout l(k, n);
      std::size_t lo = k, hi = 0, covered = 0;
      for (int s = 0; s < n; ++s) {
        ASSERT_EQ(l.offset(s), covered);
        covered += l.size(s);
        lo = std::min(lo, l.size(s));
        hi = std::max(hi, l.size(s));
        if (s > 0) {
          ASSERT_LE(l.size(s), l.size(s - 1));
        }
      }
      ASSERT_EQ(covered, k);
      ASSERT_LE(hi - lo, 1u);
    }
  }
}

TEST(Batch, SamplingIsKeyedAndBounded) {
  auto a = sampleBatchIndices(7, 2, 5, 13, 32);
  EXPECT_EQ(a, sampleBatchIndices(7, 2, 5, 13, 32));
  EXPECT_NE(a, sampleBatchIndices(7, 3, 5, 13, 32));
  EXPECT_NE(a, sampleBatchIndices(7, 2, 6, 13, 32));
  for (auto i : a) EXPECT_LT(i, 13u);
  EXPECT_THROW(sampleBatchIndices(7, 0, 0, 0, 4), InvalidArgument);
}

TEST(Batch, SplitsInputsAndTargets) {
  std::vector<Record> recs{{1, 2, 3}, {4, 5, 6}};
  const std::size_t idx[] = {1, 1, 0};
  Batch b = makeBatch(recs, idx, 2, 1);
  EXPECT_EQ(std::vector<double>(b.inputs.data().begin(), b.inputs.data().end()),
            (std::vector<double>{4, 5, 4, 5, 1, 2}));
  EXPECT_EQ(std::vector<double>(b.targets.data().begin(), b.targets.data().end()),
            (std::vector<double>{6, 6, 3}));
  EXPECT_THROW(makeBatch(recs, idx, 3, 1), ShapeError);
}

TEST(TrainingDatasets, ReplicasIdenticalAndZipIsLocal) {
  auto w = bench::makeWorkload(WorkloadKind::kXorMlp, 1);
  TrainingConfig c = configFor(w, 4, 1, 4, 0.1);
  NetworkStats net(4);
  DatasetEngine engine(4, &net);
  TrainingDatasets ds = buildTrainingDatasets(engine, c, w.samples);
  auto init = nn::initParams(w.spec, c.seed);
  for (int p = 0; p < 4; ++p) {
    Partition z = engine.materialize(ds.zipped, p, p);
    EXPECT_EQ(z->right().records()[0], init);
    EXPECT_EQ(z->left().records().size(), 64u);
  }
  EXPECT_EQ(net.totalOutbound(), 0u);
}

TEST(TrainingDatasets, SinglePartition) {
  auto w = bench::makeWorkload(WorkloadKind::kLinReg, 1);
  DatasetEngine engine(1);
  TrainingDatasets ds = buildTrainingDatasets(engine, configFor(w, 1, 1, 4, 0.1), w.samples);
  EXPECT_EQ(engine.numPartitions(ds.zipped), 1);
  EXPECT_EQ(engine.materialize(ds.zipped, 0)->left().records().size(), w.samples.size());
}

TEST(TrainingDatasets, TooFewSamples) {
  auto w = bench::makeWorkload(WorkloadKind::kLinReg, 1);
  DatasetEngine engine(8);
  std::vector<Record> few(w.samples.begin(), w.samples.begin() + 3);
  EXPECT_THROW(buildTrainingDatasets(engine, configFor(w, 8, 1, 4, 0.1), few), InvalidArgument);
}

// Sync task on hand-made blocks: slices [1,2] and [3,4], weights [10,10],
// lr 0.1, mean aggregation -> [9.8, 9.7].
TEST(ParameterSyncTask, HandArithmetic) {
  TrainingConfig c;
  c.numPartitions = 2;
  c.learningRate = 0.1;
  c.modelSpec = nn::Linear(1, 2);  // K = 4, two slices of 2
  SliceLayout layout(4, 2);
  DatasetEngine engine(2);
  BlockStore store;
  const double g0[] = {1, 2};
  const double g1[] = {3, 4};
  const double w[] = {10, 10};
  store.put(gradientSliceId(1, 0, 1), Blob::fromValues(g0), 0);
  store.put(gradientSliceId(1, 1, 1), Blob::fromValues(g1), 1);
  store.put(weightSliceId(0, 1), Blob::fromValues(w), 1);
  TaskEnv env{c, layout, engine, {}, SimDuration(0)};
  CostModel cost;
  TaskContext ctx(store, cost, {1, 1, JobKind::kParameterSync, 1, 0, 0, 1});
  parameterSyncTask(ctx, env);
  auto out = store.get(weightSliceId(1, 1), 1).blob.values();
  EXPECT_DOUBLE_EQ(out[0], 9.8);
  EXPECT_DOUBLE_EQ(out[1], 9.7);
  EXPECT_EQ(out, nn::sgdStep(std::vector<double>{10, 10}, std::vector<double>{2, 3}, 0.1));

  // Plain sum doubles the step.
  c.aggregation = Aggregation::kSum;
  BlockStore store2;
  store2.put(gradientSliceId(1, 0, 1), Blob::fromValues(g0), 0);
  store2.put(gradientSliceId(1, 1, 1), Blob::fromValues(g1), 1);
  store2.put(weightSliceId(0, 1), Blob::fromValues(w), 1);
  TaskContext ctx2(store2, cost, {1, 1, JobKind::kParameterSync, 1, 0, 0, 1});
  parameterSyncTask(ctx2, env);
  auto summed = store2.get(weightSliceId(1, 1), 1).blob.values();
  EXPECT_DOUBLE_EQ(summed[0], 9.6);
  EXPECT_DOUBLE_EQ(summed[1], 9.4);
}

TEST(ParameterSyncTask, ZeroGradientKeepsWeightsBitForBit) {
  TrainingConfig c;
  c.numPartitions = 3;
  c.learningRate = 0.7;
  c.modelSpec = nn::Linear(2, 2);  // K = 6
  SliceLayout layout(6, 3);
  DatasetEngine engine(3);
  BlockStore store;
  const double zero[] = {0, 0};
  const double w[] = {0.1, -1e-300};
  for (int t = 0; t < 3; ++t) store.put(gradientSliceId(4, t, 2), Blob::fromValues(zero), t);
  store.put(weightSliceId(3, 2), Blob::fromValues(w), 2);
  TaskEnv env{c, layout, engine, {}, SimDuration(0)};
  CostModel cost;
  TaskContext ctx(store, cost, {2, 2, JobKind::kParameterSync, 4, 0, 0, 1});
  parameterSyncTask(ctx, env);
  EXPECT_EQ(store.get(weightSliceId(4, 2), 2).blob, Blob::fromValues(w));
}

TEST(ForwardBackwardTask, SingleTaskPutsOneFullSlice) {
  auto w = bench::makeWorkload(WorkloadKind::kXorMlp, 1);
  TrainingConfig c = configFor(w, 1, 1, 8, 0.1);
  Trainer t(c, w.samples);
  t.run();
  auto g = t.cluster().store().peek(gradientSliceId(0, 0, 0));
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(g->size(), nn::paramCount(w.spec));
}

TEST(ForwardBackwardTask, SliceLengthsFollowLayout) {
  TrainingConfig c;
  c.numPartitions = 4;
  c.iterations = 1;
  c.perTaskBatch = 2;
  c.modelSpec = nn::Linear(4, 2);                                       // K = 10
  std::vector<Record> samples;
  for (int r = 0; r < 8; ++r) samples.push_back({0.1 * r, 1, -1, 0.5, 0, 1});
  Trainer t(c, samples);
  t.run();
  std::vector<std::size_t> sizes;
  for (int s = 0; s < 4; ++s) sizes.push_back(t.cluster().store().peek(gradientSliceId(0, 2, s))->size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 3, 2, 2}));
}

TEST(Train, ZeroIterationsReturnsInitialParams) {
  auto w = bench::makeWorkload(WorkloadKind::kXorMlp, 1);
  TrainResult r = train(configFor(w, 4, 0, 16, 0.5, 42), w.samples);
  EXPECT_EQ(r.finalParams, nn::initParams(w.spec, 42));
  EXPECT_TRUE(r.stats.empty());
}

TEST(Train, XorMatchesOracleAt500Iterations) {
  auto w = bench::makeWorkload(WorkloadKind::kXorMlp, 1);
  TrainingConfig c = configFor(w, 4, 500, 16, 0.5);
  EXPECT_LE(maxAbsDiff(train(c, w.samples).finalParams, sequentialOracle(c, w.samples)), 1e-9);
}

TEST(Train, SingleTaskIsPlainMiniBatchSgd) {
  auto w = bench::makeWorkload(WorkloadKind::kLinReg, 2);
  TrainingConfig c = configFor(w, 1, 20, 8, 0.1, 2);
  // Independent loop: same draws, one step per batch.
  auto params = nn::initParams(w.spec, 2);
  for (int i = 0; i < 20; ++i) {
    auto idx = sampleBatchIndices(2, 0, i, w.samples.size(), 8);
    Batch b = makeBatch(w.samples, idx, 8, 1);
    nn::ModelReplica m(w.spec, params);
    params = nn::sgdStep(params, m.backward(b.inputs, b.targets, w.loss).gradient, 0.1);
  }
  EXPECT_EQ(train(c, w.samples).finalParams, params);
  EXPECT_EQ(sequentialOracle(c, w.samples), params);
}

TEST(Oracle, AggregationModesDivergeUnlessSingleTask) {
  auto w = bench::makeWorkload(WorkloadKind::kXorMlp, 1);
  for (int n : {1, 4}) {
    TrainingConfig mean = configFor(w, n, 50, 8, 0.5);
    TrainingConfig sum = mean;
    sum.aggregation = Aggregation::kSum;
    double d = maxAbsDiff(sequentialOracle(mean, w.samples), sequentialOracle(sum, w.samples));
    if (n == 1) {
      EXPECT_EQ(d, 0.0);
    } else {
      EXPECT_GT(d, 1e-3);
    }
  }
}

// Property: bit-identical to the oracle for every workload and N in {1,2,4,8}.
TEST(Train, OracleEquivalenceProperty) {
  for (WorkloadKind kind : bench::kAllWorkloads) {
    auto w = bench::makeWorkload(kind, 3);
    for (int n : {1, 2, 4, 8}) {
      for (Aggregation agg : {Aggregation::kSumThenScaleByN, Aggregation::kSum}) {
        TrainingConfig c = configFor(w, n, 100, 4, agg == Aggregation::kSum ? 0.05 : 0.2, 3);
        c.aggregation = agg;
        EXPECT_LE(maxAbsDiff(train(c, w.samples).finalParams, sequentialOracle(c, w.samples)),
                  1e-9)
            << bench::toString(kind) << " N=" << n;
      }
    }
  }
}

TrainOptions withFaults(std::vector<FaultSpec> faults) {
  TrainOptions o;
  o.cluster.faultPlan = std::move(faults);
  return o;
}

TEST(Train, FaultAtIterationTenIsTransparent) {
  auto w = bench::makeWorkload(WorkloadKind::kXorMlp, 1);
  TrainingConfig c = configFor(w, 4, 20, 16, 0.5);
  TrainResult clean = train(c, w.samples);
  for (JobKind kind : {JobKind::kForwardBackward, JobKind::kParameterSync}) {
    for (KillMode mode : {KillMode::kKillBeforeEffects, KillMode::kKillAfterPartialPut}) {
      TrainResult r = train(c, w.samples, withFaults({FaultSpec{10, kind, 2, mode}}));
      EXPECT_EQ(r.finalParams, clean.finalParams);
      EXPECT_EQ(r.stats[10].retries, 1);
    }
  }
}

TEST(Train, OneFaultPerJobAcrossManyJobs) {
  auto w = bench::makeWorkload(WorkloadKind::kToyNcf, 1);
  TrainingConfig c = configFor(w, 4, 12, 8, 1.5);
  std::vector<FaultSpec> plan;
  for (int i = 0; i < 12; ++i) {
    plan.push_back({i, JobKind::kForwardBackward, i % 4,
                    i % 2 ? KillMode::kKillAfterPartialPut : KillMode::kKillBeforeEffects});
    plan.push_back({i, JobKind::kParameterSync, (i + 1) % 4,
                    i % 3 ? KillMode::kKillBeforeEffects : KillMode::kKillAfterPartialPut});
  }
  EXPECT_EQ(train(c, w.samples, withFaults(plan)).finalParams, train(c, w.samples).finalParams);
}

TEST(Train, StatelessWhenCachesDroppedBetweenJobs) {
  auto w = bench::makeWorkload(WorkloadKind::kXorMlp, 1);
  TrainingConfig c = configFor(w, 4, 15, 8, 0.5);
  TrainOptions o;
  o.dropCachesBetweenJobs = true;
  Trainer dropped(c, w.samples, o);
  TrainResult a = dropped.run();
  EXPECT_EQ(a.finalParams, train(c, w.samples).finalParams);
  // Every job rebuilt its inputs from lineage.
  EXPECT_GT(dropped.engine().computeCount(dropped.sampleDataset(), 0), 1u);
}

TEST(Train, EvictionKeepsOnlyLastTwoIterations) {
  auto w = bench::makeWorkload(WorkloadKind::kLinReg, 1);
  Trainer t(configFor(w, 2, 6, 4, 0.1), w.samples);
  t.run();
  for (const auto& [id, blob] : t.cluster().store().snapshot()) EXPECT_GE(id.iteration, 4);
}

TEST(Train, EventLogShowsBarriersReplicaAgreementAndConservation) {
  auto w = bench::makeWorkload(WorkloadKind::kXorMlp, 1);
  TrainingConfig c = configFor(w, 4, 8, 8, 0.5);
  Trainer t(c, w.samples, withFaults({{3, JobKind::kParameterSync, 1,
                                       KillMode::kKillAfterPartialPut}}));
  t.run();
  const auto& events = t.cluster().events().events();
  EXPECT_FALSE(findBarrierViolation(events).has_value());
  // Two jobs per iteration, each closed by a barrier.
  int barriers = 0;
  for (const Event& e : events) barriers += e.type == EventType::kBarrier;
  EXPECT_EQ(barriers, 16);
  // No forward-backward task of iteration i+1 starts before every weight slice
  // of iteration i exists.
  std::map<std::int64_t, int> weightPuts;
  for (const Event& e : events) {
    if (e.type == EventType::kBlockPut && e.block->kind == BlockKind::kWeightSlice &&
        !e.duplicate) {
      ++weightPuts[e.iteration];
    }
    if (e.type == EventType::kTaskStart && e.kind == JobKind::kForwardBackward &&
        e.iteration > 0) {
      EXPECT_EQ(weightPuts[e.iteration - 1], 4);
    }
  }
  // Every forward-backward task of one iteration trained on the same weights.
  std::map<std::int64_t, std::set<std::string>> digests;
  for (const Event& e : events) {
    if (e.type == EventType::kTaskEnd && e.kind == JobKind::kForwardBackward) {
      digests[e.iteration].insert(e.digest);
    }
  }
  EXPECT_EQ(digests.size(), 8u);
  for (const auto& [i, d] : digests) EXPECT_EQ(d.size(), 1u) << "iteration " << i;
  EXPECT_EQ(t.cluster().network().totalInbound(), t.cluster().network().totalOutbound());
}

TEST(Train, DeterministicAcrossRunsAndThreadCounts) {
  auto w = bench::makeWorkload(WorkloadKind::kToyNcf, 1);
  TrainingConfig c = configFor(w, 4, 10, 8, 1.5);
  auto logOf = [&](int threads) {
    TrainOptions o;
    o.cluster.threadsPerNode = threads;
    o.cluster.scheduleCost = SimDuration(0.1);
    o.cluster.cost.perRemoteByte = SimDuration(1e-5);
    Trainer t(c, w.samples, o);
    t.run();
    std::ostringstream out;
    t.cluster().events().writeJsonLines(out);
    return out.str();
  };
  std::string a = logOf(1);
  EXPECT_EQ(a, logOf(1));
  EXPECT_EQ(a, logOf(3));
}

TEST(Train, CommunicationVolumeMatchesSlices) {
  auto w = bench::makeWorkload(WorkloadKind::kXorMlp, 1);  // K = 33
  TrainingConfig c = configFor(w, 4, 3, 4, 0.5);
  Trainer t(c, w.samples);
  TrainResult r = t.run();
  const std::uint64_t k = 33;
  // Iterations whose broadcast was read by a following iteration.
  for (std::int64_t i = 0; i < 2; ++i) {
    for (int n = 0; n < 4; ++n) {
      auto bytes = t.cluster().network().node(n, i);
      std::uint64_t s = t.layout().size(n);
      EXPECT_EQ(bytes.outbound, 8 * (k + 2 * s));
      EXPECT_EQ(bytes.inbound, 8 * (k + 2 * s));
    }
    EXPECT_EQ(r.stats[i].shuffleBytes, 8 * k * 3);
    EXPECT_EQ(r.stats[i].broadcastBytes, 8 * k * 3);
  }
}

TEST(SyncOverhead, SingleNodePaysOnlyUpdateCost) {
  auto w = bench::makeWorkload(WorkloadKind::kLinReg, 1);  // K = 9
  TrainOptions o;
  o.forwardBackwardCompute = SimDuration(2.0);
  o.cluster.cost.perRemoteByte = SimDuration(1.0);
  o.cluster.cost.perUpdatedElement = SimDuration(0.01);
  TrainResult r = train(configFor(w, 1, 5, 4, 0.1), w.samples, o);
  SyncOverhead s = measureSyncOverhead(r.stats);
  for (double f : s.perIteration) EXPECT_DOUBLE_EQ(f, 9 * 0.01 / 2.0);
}

TEST(SyncOverhead, DoublingKDoublesBytesAndRaisesFraction) {
  auto runK = [](std::size_t k) {
    TrainingConfig c;
    c.numPartitions = 4;
    c.iterations = 3;
    c.perTaskBatch = 2;
    c.modelSpec = bench::commModel(k);
    TrainOptions o;
    o.cluster.cost.perRemoteByte = SimDuration(1e-4);
    Trainer t(c, bench::commSamples(k, 16), o);
    return t.run();
  };
  TrainResult small = runK(400);
  TrainResult large = runK(800);
  EXPECT_EQ(2 * small.stats[0].shuffleBytes, large.stats[0].shuffleBytes);
  EXPECT_EQ(2 * small.stats[0].broadcastBytes, large.stats[0].broadcastBytes);
  EXPECT_GT(measureSyncOverhead(large.stats).mean, measureSyncOverhead(small.stats).mean);
}

TEST(Trainer, RunsOnce) {
  auto w = bench::makeWorkload(WorkloadKind::kLinReg, 1);
  Trainer t(configFor(w, 2, 1, 4, 0.1), w.samples);
  t.run();
  EXPECT_THROW(t.run(), SequencingError);
}

TEST(Trainer, RejectsInvalidConfig) {
  auto w = bench::makeWorkload(WorkloadKind::kLinReg, 1);
  EXPECT_THROW(train(configFor(w, 0, 1, 4, 0.1), w.samples), InvalidArgument);
  EXPECT_THROW(train(configFor(w, 2, 1, 0, 0.1), w.samples), InvalidArgument);
  EXPECT_THROW(train(configFor(w, 2, 1, 4, 0.0), w.samples), InvalidArgument);
}

TEST(Trainer, DivergenceAbortsWithNonFiniteError) {
  auto w = bench::makeWorkload(WorkloadKind::kLinReg, 1);
  EXPECT_THROW(train(configFor(w, 2, 400, 4, 1e3), w.samples), NonFiniteError);
}

}  // namespace
}  // namespace shufflesgd
