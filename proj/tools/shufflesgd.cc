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

// Command-line driver: train, verify-oracle, bench-comm, bench-sched and
// fault-drill. Every subcommand exits nonzero when its check fails.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "shufflesgd/bench/commands.h"

namespace fs = std::filesystem;
using namespace shufflesgd;
using namespace shufflesgd::bench;

namespace {

RunManifest loadWithOverrides(const std::string& path, const std::optional<std::uint64_t>& seed,
                              const std::optional<std::int64_t>& iterations) {
  RunManifest m = loadManifest(path);
  if (seed) m.seed = *seed;
  if (iterations) {
    m.iterations = *iterations;
    m.epochs.reset();
  }
  return m;
}

fs::path outputDir(const std::string& flag, const RunManifest* manifest) {
  if (!flag.empty()) return flag;
  return manifest ? fs::path(manifest->outputDir) : fs::path();
}

void writeTable(const fs::path& dir, const std::string& name, const CsvTable& table) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  table.write(dir / name);
  fmt::print("wrote {}\n", (dir / name).string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchronous data-parallel SGD on a simulated cluster"};
  app.require_subcommand(1);

  std::string manifestPath;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> iterations;

  auto* trainCmd = app.add_subcommand("train", "Run one training job from a manifest");
  bool requireLearning = false;
  trainCmd->add_option("-m,--manifest", manifestPath, "Run manifest")->required();
  trainCmd->add_option("-o,--out", out, "Output directory (overrides output_dir)");
  trainCmd->add_option("--seed", seed, "Override the manifest seed");
  trainCmd->add_option("--iterations", iterations, "Override iterations (replaces epochs)");
  trainCmd->add_flag("--require-learning", requireLearning,
                     "Exit nonzero if the workload's learning criterion is not met");

  auto* oracleCmd = app.add_subcommand("verify-oracle", "Compare training with the oracle");
  std::vector<int> oracleNs{1, 2, 4, 8};
  bool mismatch = false;
  oracleCmd->add_option("-m,--manifest", manifestPath, "Run manifest")->required();
  oracleCmd->add_option("-n,--partitions", oracleNs, "Partition counts")->delimiter(',');
  oracleCmd->add_option("-o,--out", out, "Output directory");
  oracleCmd->add_option("--seed", seed, "Override the manifest seed");
  oracleCmd->add_option("--iterations", iterations, "Override iterations (replaces epochs)");
  oracleCmd->add_flag("--mismatch-aggregation", mismatch,
                      "Negative control: give the oracle the other aggregation mode");

  auto* commCmd = app.add_subcommand("bench-comm", "Measure per-node synchronization bytes");
  std::vector<std::size_t> commKs{100, 1000, 100000};
  std::vector<int> commNs{2, 4, 8, 16};
  std::uint64_t commSeed = 0;
  commCmd->add_option("-k,--params", commKs, "Parameter counts K")->delimiter(',');
  commCmd->add_option("-n,--partitions", commNs, "Partition counts N")->delimiter(',');
  commCmd->add_option("--seed", commSeed, "Seed");
  commCmd->add_option("-o,--out", out, "Output directory");

  auto* schedCmd = app.add_subcommand("bench-sched", "Sweep task-dispatch overhead");
  SweepParams sweep = calibratedSweep();
  double deltaMs = sweep.scheduleCost.count();
  double computeMs = sweep.computeTime.count();
  schedCmd->add_option("-t,--tasks", sweep.taskCounts, "Task counts")->delimiter(',');
  schedCmd->add_option("-g,--groups", sweep.groupSizes, "Group sizes G")->delimiter(',');
  schedCmd->add_option("--delta-ms", deltaMs, "Dispatch cost per task (virtual ms)");
  schedCmd->add_option("--compute-ms", computeMs, "Task duration (virtual ms)");
  schedCmd->add_option("--nodes", sweep.numNodes, "Simulated nodes");
  schedCmd->add_option("--iterations", sweep.iterations, "Iterations (0 = lcm of G)");
  schedCmd->add_option("-o,--out", out, "Output directory");

  auto* drillCmd = app.add_subcommand("fault-drill", "Paired fault / fault-free runs");
  std::vector<std::string> cases;
  drillCmd->add_option("-m,--manifest", manifestPath, "Run manifest")->required();
  drillCmd->add_option("-c,--case", cases,
                       "iteration,job_kind,task,mode (repeatable; default matrix if absent)");
  drillCmd->add_option("-o,--out", out, "Output directory");
  drillCmd->add_option("--seed", seed, "Override the manifest seed");
  drillCmd->add_option("--iterations", iterations, "Override iterations (replaces epochs)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*trainCmd) {
      RunManifest m = loadWithOverrides(manifestPath, seed, iterations);
      fs::path dir = outputDir(out, &m);
      TrainReport r = cmdTrain(m, dir);
      fmt::print("workload={} N={} M={} initial_loss={} final_loss={}", toString(m.workload),
                 r.config.numPartitions, r.config.iterations, r.initialLoss, r.finalLoss);
      if (r.plantedError) fmt::print(" planted_error={}", *r.plantedError);
      fmt::print(" digest={}\n{}: {}\n", r.paramsDigest, r.criterion,
                 r.learned ? "met" : "NOT met");
      if (!dir.empty()) fmt::print("wrote {}\n", dir.string());
      return requireLearning && !r.learned ? 1 : 0;
    }
    if (*oracleCmd) {
      RunManifest m = loadWithOverrides(manifestPath, seed, iterations);
      auto checks = cmdVerifyOracle(m, oracleNs, mismatch);
      bool ok = true;
      for (const auto& c : checks) {
        fmt::print("N={} M={} max_abs_diff={}\n", c.partitions, c.iterations, c.maxAbsDiff);
        if (mismatch) {
          if (c.partitions > 1 && !(c.maxAbsDiff > 1e-3)) {
            fmt::print(stderr, "negative control not detected at N={} (diff {})\n",
                       c.partitions, c.maxAbsDiff);
            ok = false;
          }
        } else if (!c.pass) {
          fmt::print(stderr, "oracle mismatch at N={}: {} > {}\n", c.partitions, c.maxAbsDiff,
                     kOracleTolerance);
          ok = false;
        }
      }
      writeTable(outputDir(out, &m), "oracle.csv", oracleTable(manifestHash(m), checks));
      return ok ? 0 : 1;
    }
    if (*commCmd) {
      CommReport r = cmdBenchComm(commKs, commNs, commSeed);
      for (const auto& c : r.cells) {
        fmt::print("K={} N={} mean_out={} closed_form={} total_out={} total_in={}{}\n", c.params,
                   c.partitions, c.meanOutbound, c.predictedClosedForm, c.totalOutbound,
                   c.totalInbound, c.divisible ? "" : " (N does not divide K)");
      }
      writeTable(outputDir(out, nullptr), "comm.csv",
                 commTable(commHash(commKs, commNs, commSeed), r));
      for (const auto& f : r.failures) fmt::print(stderr, "{}\n", f);
      return r.failures.empty() ? 0 : 1;
    }
    if (*schedCmd) {
      sweep.scheduleCost = SimDuration(deltaMs);
      sweep.computeTime = SimDuration(computeMs);
      SchedReport r = cmdBenchSched(sweep);
      for (const auto& row : r.rows) {
        fmt::print("tasks={} G={} overhead_fraction={} events_per_iteration={}\n", row.taskCount,
                   row.groupSize, row.overheadFraction, row.eventsPerIteration);
      }
      writeTable(outputDir(out, nullptr), "sched.csv", schedTable(schedHash(sweep), r));
      if (r.violation) fmt::print(stderr, "monotonicity violation: {}\n", *r.violation);
      return r.violation ? 1 : 0;
    }
    if (*drillCmd) {
      RunManifest m = loadWithOverrides(manifestPath, seed, iterations);
      std::vector<FaultSpec> matrix;
      for (const auto& c : cases) matrix.push_back(parseFault(c));
      if (cases.empty()) {
        Workload w = workloadFor(m);
        matrix = defaultFaultMatrix(m.partitions, trainingConfigFor(m, w).iterations);
      }
      auto results = cmdFaultDrill(m, matrix);
      bool ok = true;
      for (const auto& c : results) {
        fmt::print("{} retries={} params_identical={} store_identical={}{}\n",
                   formatFault(c.fault), c.retries, c.paramsIdentical, c.storeIdentical,
                   c.firstDifference.empty() ? "" : " first_difference=" + c.firstDifference);
        ok = ok && c.pass;
      }
      writeTable(outputDir(out, &m), "fault_drill.csv", drillTable(manifestHash(m), results));
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
