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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shufflesgd/bench/csv.h"
#include "shufflesgd/bench/manifest.h"
#include "shufflesgd/sim/schedule.h"

namespace shufflesgd::bench {

// ---- train ----------------------------------------------------------------

struct TrainReport {
  std::string manifestHash;
  TrainingConfig config;
  TrainResult result;
  double initialLoss = 0.0;  // full-dataset loss at the initial parameters
  double finalLoss = 0.0;    // full-dataset loss at the final parameters
  std::optional<double> plantedError;  // lin_reg: max |w - planted|
  std::string paramsDigest;
  bool learned = false;      // the workload's learning criterion below
  std::string criterion;
};

// Learning criteria: xor_mlp final loss < 0.05; lin_reg planted error < 1e-3;
// toy_ncf final loss < 0.5 * initial loss.
void evaluateLearning(WorkloadKind kind, TrainReport& report);

// Writes to outDir (created if missing; skipped when empty):
//   final_params.bin  raw little-endian f64, K values, no header
//   manifest.txt      canonical manifest
//   loss.csv, iterations.csv, network.csv, summary.csv
//   events.jsonl      event log, one JSON object per line
//   wallclock.csv     informational wall time per iteration (not reproducible)
TrainReport cmdTrain(const RunManifest& manifest, const std::filesystem::path& outDir);

// ---- verify-oracle --------------------------------------------------------

struct OracleCheck {
  int partitions = 0;
  std::int64_t iterations = 0;
  double maxAbsDiff = 0.0;
  bool pass = false;
};

inline constexpr double kOracleTolerance = 1e-9;

// Runs train and the sequential oracle for each partition count. With
// mismatchAggregation the oracle uses the other aggregation mode, which must
// produce a visible difference whenever N > 1.
std::vector<OracleCheck> cmdVerifyOracle(const RunManifest& manifest,
                                         std::span<const int> partitionCounts,
                                         bool mismatchAggregation = false);
CsvTable oracleTable(const std::string& hash, const std::vector<OracleCheck>& checks);

// ---- bench-comm -----------------------------------------------------------

// One row per (K, N, node) for iteration 0 of a two-iteration run.
struct CommRow {
  std::size_t params = 0;  // K
  int partitions = 0;      // N
  int node = 0;
  std::size_t sliceSize = 0;
  std::uint64_t shuffleOut = 0;
  std::uint64_t broadcastOut = 0;
  std::uint64_t outbound = 0;
  std::uint64_t inbound = 0;
  // 8 * (K + (N - 2) * sliceSize): exact for this node's slice size.
  std::uint64_t predictedExact = 0;
  // 2 * (N - 1) / N * K * 8, the per-node closed form. Equal to the exact
  // prediction when N divides K; otherwise equal to the node mean.
  double predictedClosedForm = 0.0;
  double ringAllReduce = 0.0;  // same closed form for Ring AllReduce
};

struct CommCell {
  std::size_t params = 0;
  int partitions = 0;
  std::uint64_t totalOutbound = 0;
  std::uint64_t totalInbound = 0;
  double meanOutbound = 0.0;
  double predictedClosedForm = 0.0;
  bool divisible = false;
};

struct CommReport {
  std::vector<CommRow> rows;
  std::vector<CommCell> cells;
  std::vector<std::string> failures;  // empty when every assertion held
};

CommReport cmdBenchComm(std::span<const std::size_t> paramCounts,
                        std::span<const int> partitionCounts, std::uint64_t seed = 0);
CsvTable commTable(const std::string& hash, const CommReport& report);
std::string commHash(std::span<const std::size_t> paramCounts,
                     std::span<const int> partitionCounts, std::uint64_t seed);

// ---- bench-sched ----------------------------------------------------------

// Task counts {100, 200, 500}, G in {1, 10}, 16 nodes, 2000 ms per task and
// 0.44 ms dispatch cost per task: 500 tasks cost 11% of compute at G = 1.
SweepParams calibratedSweep();

struct SchedReport {
  std::vector<ScheduleRow> rows;
  std::optional<std::string> violation;
};

SchedReport cmdBenchSched(const SweepParams& params);
CsvTable schedTable(const std::string& hash, const SchedReport& report);
std::string schedHash(const SweepParams& params);

// ---- fault-drill ----------------------------------------------------------

struct DrillCase {
  FaultSpec fault;
  int retries = 0;
  bool paramsIdentical = false;
  bool storeIdentical = false;
  std::string firstDifference;  // first differing block or parameter, if any
  bool pass = false;            // identical results and the fault fired
};

// Both job kinds x both kill modes x {first, last} task, at iteration
// min(10, iterations - 1).
std::vector<FaultSpec> defaultFaultMatrix(int partitions, std::int64_t iterations);

// Paired runs against one fault-free baseline. Faults listed in the manifest
// itself are ignored.
std::vector<DrillCase> cmdFaultDrill(const RunManifest& manifest,
                                     std::span<const FaultSpec> matrix);
CsvTable drillTable(const std::string& hash, const std::vector<DrillCase>& cases);

// Raw little-endian f64 values, no header.
std::vector<std::byte> encodeParams(std::span<const double> params);

}  // namespace shufflesgd::bench
