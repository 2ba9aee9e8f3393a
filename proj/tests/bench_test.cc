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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "shufflesgd/bench/commands.h"
#include "shufflesgd/bench/csv.h"
#include "shufflesgd/bench/manifest.h"
#include "shufflesgd/bench/workloads.h"
#include "shufflesgd/common/errors.h"

namespace shufflesgd::bench {
namespace {

namespace fs = std::filesystem;

constexpr const char* kXor = R"(# small xor run
workload = xor_mlp
partitions = 4
iterations = 30
batch_size = 16
learning_rate = 0.5
seed = 1
fault = 3,parameter_sync,1,kill_after_partial_put
output_dir = out/xor
)";

TEST(Manifest, ParsesKeysAndDefaults) {
  RunManifest m = parseManifest(kXor);
  EXPECT_EQ(m.workload, WorkloadKind::kXorMlp);
  EXPECT_EQ(m.partitions, 4);
  EXPECT_EQ(m.iterations, 30);
  EXPECT_FALSE(m.epochs.has_value());
  EXPECT_EQ(m.learningRate, 0.5);
  EXPECT_EQ(m.aggregation, Aggregation::kSumThenScaleByN);
  EXPECT_EQ(m.groupSize, 1);
  EXPECT_EQ(m.outputDir, "out/xor");
  ASSERT_EQ(m.faults.size(), 1u);
  EXPECT_EQ(m.faults[0], (FaultSpec{3, JobKind::kParameterSync, 1,
                                    KillMode::kKillAfterPartialPut}));
}

TEST(Manifest, SerializeRoundTripsAndHashIgnoresOutputDir) {
  RunManifest m = parseManifest(kXor);
  RunManifest again = parseManifest(serialize(m));
  EXPECT_EQ(serialize(again), serialize(m));
  EXPECT_EQ(manifestHash(again), manifestHash(m));
  EXPECT_EQ(manifestHash(m).size(), 16u);
  again.outputDir = "elsewhere";
  EXPECT_EQ(manifestHash(again), manifestHash(m));
  again.learningRate = 0.25;
  EXPECT_NE(manifestHash(again), manifestHash(m));
}

TEST(Manifest, RejectsMalformedInput) {
  EXPECT_THROW(parseManifest("partitions = 2\niterations = 1\n"), InvalidArgument);
  EXPECT_THROW(parseManifest("workload = xor_mlp\n"), InvalidArgument);
  EXPECT_THROW(parseManifest("workload = xor_mlp\niterations = 1\nepochs = 2\n"), InvalidArgument);
  EXPECT_THROW(parseManifest("workload = xor_mlp\niterations = 1\niterations = 2\n"),
               InvalidArgument);
  EXPECT_THROW(parseManifest("workload = xor_mlp\niterations = 1\ncolour = red\n"),
               InvalidArgument);
  EXPECT_THROW(parseManifest("workload = xor_mlp\niterations = x\n"), InvalidArgument);
  EXPECT_THROW(parseManifest("workload = cats\niterations = 1\n"), InvalidArgument);
  EXPECT_THROW(parseManifest("workload = xor_mlp\niterations = 1\nformat_version = 9\n"),
               InvalidArgument);
  EXPECT_THROW(parseManifest("workload xor_mlp\n"), InvalidArgument);
}

TEST(Manifest, FaultTextRoundTrips) {
  for (JobKind kind : {JobKind::kForwardBackward, JobKind::kParameterSync}) {
    for (KillMode mode : {KillMode::kKillBeforeEffects, KillMode::kKillAfterPartialPut}) {
      FaultSpec f{17, kind, 5, mode};
      EXPECT_EQ(parseFault(formatFault(f)), f);
    }
  }
  EXPECT_EQ(formatFault({2, JobKind::kForwardBackward, 0, KillMode::kKillBeforeEffects}),
            "2,forward_backward,0,kill_before_effects");
  EXPECT_THROW(parseFault("2,forward_backward,0"), InvalidArgument);
  EXPECT_THROW(parseFault("2,bench,0,kill_before_effects"), InvalidArgument);
  EXPECT_THROW(parseFault("-1,forward_backward,0,kill_before_effects"), InvalidArgument);
}

TEST(Manifest, EpochsResolveToCeiling) {
  RunManifest m = parseManifest("workload = lin_reg\npartitions = 3\nbatch_size = 10\nepochs = 1\n");
  Workload w = workloadFor(m);
  // 512 samples / (3 * 10) = 17.07 -> 18
  EXPECT_EQ(trainingConfigFor(m, w).iterations, 18);
}

TEST(Manifest, OptionsConvertUnits) {
  RunManifest m = parseManifest(
      "workload = lin_reg\niterations = 1\nbyte_latency_ns = 2000\nupdate_ns_per_element = "
      "500\ncompute_ms = 3\nschedule_cost_ms = 0.5\ngroup_size = 4\n");
  TrainOptions o = trainOptionsFor(m);
  EXPECT_DOUBLE_EQ(o.cluster.cost.perRemoteByte.count(), 0.002);
  EXPECT_DOUBLE_EQ(o.cluster.cost.perUpdatedElement.count(), 0.0005);
  EXPECT_DOUBLE_EQ(o.forwardBackwardCompute.count(), 3.0);
  EXPECT_DOUBLE_EQ(o.cluster.scheduleCost.count(), 0.5);
  EXPECT_EQ(o.cluster.groupSize, 4);
}

TEST(Csv, HeaderLineAndRows) {
  CsvTable t("00ff", {"a", "b"});
  t.addRow({"1", "x"});
  EXPECT_EQ(t.str(), "# format_version=1 manifest_hash=00ff\na,b\n1,x\n");
  EXPECT_THROW(t.addRow({"1"}), InvalidArgument);
}

TEST(Csv, NumbersRoundTrip) {
  EXPECT_EQ(csvNumber(0.1), "0.1");
  EXPECT_EQ(csvNumber(3.0), "3");
  for (double v : {1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(csvNumber(v)), v);
  }
}

TEST(Workloads, DeterministicPerSeed) {
  for (WorkloadKind kind : kAllWorkloads) {
    EXPECT_EQ(parseWorkload(toString(kind)), kind);
    Workload a = makeWorkload(kind, 5);
    EXPECT_EQ(a.samples, makeWorkload(kind, 5).samples);
    EXPECT_NE(a.samples, makeWorkload(kind, 6).samples);
    for (const Record& r : a.samples) {
      ASSERT_EQ(r.size(), nn::inputWidth(a.spec) + 1);
    }
  }
}

TEST(Workloads, LinRegPlantedWeightsHaveZeroLoss) {
  Workload w = makeWorkload(WorkloadKind::kLinReg, 3);
  EXPECT_LT(datasetLoss(w, w.planted), 1e-25);
}

TEST(Workloads, ToyNcfLabelsAreBinaryAndBalancedEnough) {
  Workload w = makeWorkload(WorkloadKind::kToyNcf, 1);
  EXPECT_EQ(w.samples.size(), 1024u);
  std::size_t positives = 0;
  for (const Record& r : w.samples) {
    ASSERT_TRUE(r[2] == 0.0 || r[2] == 1.0);
    positives += r[2] == 1.0;
    EXPECT_LT(r[0], 16);
    EXPECT_GE(r[1], 16);
    EXPECT_LT(r[1], 32);
  }
  EXPECT_GT(positives, 1024u / 5);
  EXPECT_LT(positives, 1024u * 4 / 5);
}

TEST(Workloads, CommModelHasExactlyKParameters) {
  EXPECT_EQ(nn::paramCount(commModel(1000)), 1000u);
  auto s = commSamples(10, 25);
  EXPECT_EQ(s[13], (Record{3, 0}));
}

TEST(BenchComm, ExampleCell) {
  const std::size_t ks[] = {1000};
  const int ns[] = {1, 4};
  CommReport r = cmdBenchComm(ks, ns);
  EXPECT_TRUE(r.failures.empty());
  for (const CommRow& row : r.rows) {
    if (row.partitions == 1) {
      EXPECT_EQ(row.outbound, 0u);
      EXPECT_EQ(row.inbound, 0u);
    } else {
      EXPECT_EQ(row.outbound, 12000u);
      EXPECT_EQ(row.inbound, 12000u);
      EXPECT_DOUBLE_EQ(row.predictedClosedForm, 12000.0);
    }
  }
  ASSERT_EQ(r.cells.size(), 2u);
  EXPECT_EQ(r.cells[1].totalOutbound, 48000u);
}

TEST(BenchComm, UnevenSlicesMatchExactFormulaAndMean) {
  const std::size_t ks[] = {10};
  const int ns[] = {4};
  CommReport r = cmdBenchComm(ks, ns);
  EXPECT_TRUE(r.failures.empty());
  std::vector<std::uint64_t> out;
  for (const CommRow& row : r.rows) out.push_back(row.outbound);
  // slices 3,3,2,2: 8 * (10 + 2 * s)
  EXPECT_EQ(out, (std::vector<std::uint64_t>{128, 128, 112, 112}));
  EXPECT_FALSE(r.cells[0].divisible);
  EXPECT_DOUBLE_EQ(r.cells[0].meanOutbound, r.cells[0].predictedClosedForm);
}

TEST(BenchSched, CalibratedSweepHitsTargets) {
  SchedReport r = cmdBenchSched(calibratedSweep());
  EXPECT_FALSE(r.violation.has_value());
  for (const ScheduleRow& row : r.rows) {
    if (row.groupSize != 1) continue;
    if (row.taskCount == 500) {
      EXPECT_GT(row.overheadFraction, 0.10);
    } else {
      EXPECT_LT(row.overheadFraction, 0.05);
    }
  }
}

TEST(FaultDrill, DefaultMatrixHasEightDistinctCases) {
  auto m = defaultFaultMatrix(4, 30);
  ASSERT_EQ(m.size(), 8u);
  for (const FaultSpec& f : m) {
    EXPECT_EQ(f.iteration, 10);
    EXPECT_TRUE(f.taskId == 0 || f.taskId == 3);
  }
  // Single task: first and last coincide.
  EXPECT_EQ(defaultFaultMatrix(1, 5).size(), 4u);
  EXPECT_EQ(defaultFaultMatrix(1, 5)[0].iteration, 4);
}

TEST(FaultDrill, EmptyMatrixIsVacuous) {
  RunManifest m = parseManifest(kXor);
  EXPECT_TRUE(cmdFaultDrill(m, {}).empty());
}

TEST(FaultDrill, PairedRunsAreIdentical) {
  RunManifest m = parseManifest("workload = lin_reg\npartitions = 3\niterations = 12\n");
  auto cases = cmdFaultDrill(m, defaultFaultMatrix(3, 12));
  ASSERT_EQ(cases.size(), 8u);
  for (const DrillCase& c : cases) {
    EXPECT_TRUE(c.pass) << formatFault(c.fault) << ": " << c.firstDifference;
    EXPECT_EQ(c.retries, 1);
  }
}

TEST(Params, EncodingIsLittleEndianRaw) {
  const double v[] = {1.0};
  auto bytes = encodeParams(v);
  ASSERT_EQ(bytes.size(), 8u);
  EXPECT_EQ(bytes[7], std::byte{0x3f});
  EXPECT_EQ(bytes[6], std::byte{0xf0});
  EXPECT_EQ(bytes[0], std::byte{0});
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class TrainArtifacts : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("shufflesgd_bench_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }
  fs::path root_;
};

TEST_F(TrainArtifacts, TwoRunsAreByteIdentical) {
  RunManifest m = parseManifest(kXor);
  m.threadsPerNode = 2;
  TrainReport a = cmdTrain(m, root_ / "a");
  TrainReport b = cmdTrain(m, root_ / "b");
  EXPECT_EQ(a.result.finalParams, b.result.finalParams);
  for (const char* f : {"final_params.bin", "manifest.txt", "loss.csv", "iterations.csv",
                        "network.csv", "summary.csv", "events.jsonl"}) {
    std::string x = slurp(root_ / "a" / f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, slurp(root_ / "b" / f)) << f;
  }
  EXPECT_TRUE(fs::exists(root_ / "a" / "wallclock.csv"));
  EXPECT_EQ(fs::file_size(root_ / "a" / "final_params.bin"), 33u * 8);
  std::string loss = slurp(root_ / "a" / "loss.csv");
  EXPECT_EQ(loss.rfind("# format_version=1 manifest_hash=" + manifestHash(m) + "\n", 0), 0u);
}

TEST(Train, LearningCriteriaOnShippedConfigs) {
  RunManifest lin = parseManifest(
      "workload = lin_reg\npartitions = 2\niterations = 1000\nlearning_rate = 0.1\nseed = 1\n");
  TrainReport r = cmdTrain(lin, {});
  EXPECT_TRUE(r.learned) << r.criterion;
  ASSERT_TRUE(r.plantedError.has_value());
  EXPECT_LT(*r.plantedError, 1e-3);
}

}  // namespace
}  // namespace shufflesgd::bench
