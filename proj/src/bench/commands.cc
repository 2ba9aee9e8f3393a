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

#include "shufflesgd/bench/commands.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"
#include "shufflesgd/common/hash.h"
#include "shufflesgd/nn/model.h"

namespace shufflesgd::bench {

namespace {

std::string hashText(std::string_view text) {
  Fnv1a64 h;
  h.update(text);
  return toHex(h.digest());
}

double maxAbsDiff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return INFINITY;
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::fabs(a[j] - b[j]));
  return d;
}

std::string ms(SimDuration d) { return csvNumber(d.count()); }

void writeTrainArtifacts(const std::filesystem::path& dir, const RunManifest& manifest,
                         const TrainReport& report, Trainer& trainer) {
  std::filesystem::create_directories(dir);
  const std::string& hash = report.manifestHash;
  auto bytes = encodeParams(report.result.finalParams);
  {
    std::ofstream out(dir / "final_params.bin", std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing final_params.bin");
  }
  writeTextFile(dir / "manifest.txt", serialize(manifest));

  CsvTable loss(hash, {"iteration", "loss_mean"});
  CsvTable iters(hash, {"iteration", "compute_mean_ms", "sync_time_ms", "sync_fraction",
                        "scheduling_events", "forward_backward_makespan_ms",
                        "sync_makespan_ms", "shuffle_bytes", "broadcast_bytes", "retries"});
  CsvTable wall(hash, {"iteration", "wall_ns"});
  std::vector<double> fractions;
  if (!report.result.stats.empty()) {
    fractions = measureSyncOverhead(report.result.stats).perIteration;
  }
  for (std::size_t k = 0; k < report.result.stats.size(); ++k) {
    const IterationStats& s = report.result.stats[k];
    double compute = 0.0;
    for (SimDuration d : s.perTaskComputeTime) compute += d.count();
    compute /= static_cast<double>(s.perTaskComputeTime.size());
    std::string it = std::to_string(s.iteration);
    loss.addRow({it, csvNumber(s.lossMean)});
    iters.addRow({it, csvNumber(compute), ms(s.syncTime), csvNumber(fractions[k]),
                  std::to_string(s.schedulingEvents), ms(s.forwardBackwardMakespan),
                  ms(s.syncMakespan), std::to_string(s.shuffleBytes),
                  std::to_string(s.broadcastBytes), std::to_string(s.retries)});
    wall.addRow({it, std::to_string(s.wallTime.count())});
  }
  loss.write(dir / "loss.csv");
  iters.write(dir / "iterations.csv");
  wall.write(dir / "wallclock.csv");

  CsvTable net(hash, {"iteration", "phase", "node", "inbound_bytes", "outbound_bytes"});
  for (const auto& r : trainer.cluster().network().rows()) {
    net.addRow({std::to_string(r.iteration), std::string(toString(r.phase)),
                std::to_string(r.node), std::to_string(r.bytes.inbound),
                std::to_string(r.bytes.outbound)});
  }
  net.write(dir / "network.csv");

  CsvTable summary(hash, {"metric", "value"});
  summary.addRow({"workload", std::string(toString(manifest.workload))});
  summary.addRow({"partitions", std::to_string(report.config.numPartitions)});
  summary.addRow({"iterations", std::to_string(report.config.iterations)});
  summary.addRow({"param_count", std::to_string(report.result.finalParams.size())});
  summary.addRow({"initial_loss", csvNumber(report.initialLoss)});
  summary.addRow({"final_loss", csvNumber(report.finalLoss)});
  summary.addRow({"planted_error",
                  report.plantedError ? csvNumber(*report.plantedError) : std::string()});
  summary.addRow({"final_params_digest", report.paramsDigest});
  summary.addRow({"virtual_time_ms", ms(trainer.cluster().now())});
  summary.addRow({"criterion", report.criterion});
  summary.addRow({"learned", report.learned ? "true" : "false"});
  summary.write(dir / "summary.csv");

  std::ofstream events(dir / "events.jsonl", std::ios::binary | std::ios::trunc);
  trainer.cluster().events().writeJsonLines(events);
  if (!events) throw Error("failed writing events.jsonl");
}

struct RunOutput {
  TrainResult result;
  std::map<BlockId, Blob> store;
};

RunOutput runWithFaults(const RunManifest& manifest, const Workload& workload,
                        std::vector<FaultSpec> faults) {
  TrainOptions options = trainOptionsFor(manifest);
  options.cluster.faultPlan = std::move(faults);
  Trainer trainer(trainingConfigFor(manifest, workload), workload.samples, options);
  RunOutput out;
  out.result = trainer.run();
  out.store = trainer.cluster().store().snapshot();
  return out;
}

}  // namespace

std::vector<std::byte> encodeParams(std::span<const double> params) {
  std::vector<std::byte> out;
  out.reserve(params.size() * 8);
  for (double v : params) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::byte>((bits >> (8 * b)) & 0xff));
  }
  return out;
}

void evaluateLearning(WorkloadKind kind, TrainReport& report) {
  switch (kind) {
    case WorkloadKind::kXorMlp:
      report.criterion = "final_loss < 0.05";
      report.learned = report.finalLoss < 0.05;
      break;
    case WorkloadKind::kLinReg:
      report.criterion = "planted_error < 1e-3";
      report.learned = report.plantedError && *report.plantedError < 1e-3;
      break;
    case WorkloadKind::kToyNcf:
      report.criterion = "final_loss < 0.5 * initial_loss";
      report.learned = report.finalLoss < 0.5 * report.initialLoss;
      break;
  }
}

TrainReport cmdTrain(const RunManifest& manifest, const std::filesystem::path& outDir) {
  Workload workload = workloadFor(manifest);
  TrainReport report;
  report.manifestHash = manifestHash(manifest);
  report.config = trainingConfigFor(manifest, workload);
  Trainer trainer(report.config, workload.samples, trainOptionsFor(manifest));
  report.result = trainer.run();
  const auto& params = report.result.finalParams;
  report.initialLoss = datasetLoss(workload, nn::initParams(workload.spec, manifest.seed));
  report.finalLoss = datasetLoss(workload, params);
  if (!workload.planted.empty()) report.plantedError = maxAbsDiff(params, workload.planted);
  report.paramsDigest = toHex(hashValues(params));
  evaluateLearning(manifest.workload, report);
  if (!outDir.empty()) writeTrainArtifacts(outDir, manifest, report, trainer);
  return report;
}

std::vector<OracleCheck> cmdVerifyOracle(const RunManifest& manifest,
                                         std::span<const int> partitionCounts,
                                         bool mismatchAggregation) {
  Workload workload = workloadFor(manifest);
  std::vector<OracleCheck> out;
  for (int n : partitionCounts) {
    RunManifest m = manifest;
    m.partitions = n;
    m.faults.clear();
    TrainingConfig config = trainingConfigFor(m, workload);
    TrainResult trained = train(config, workload.samples, trainOptionsFor(m));
    TrainingConfig oracleConfig = config;
    if (mismatchAggregation) {
      oracleConfig.aggregation = config.aggregation == Aggregation::kSum
                                     ? Aggregation::kSumThenScaleByN
                                     : Aggregation::kSum;
    }
    std::vector<double> expected = sequentialOracle(oracleConfig, workload.samples);
    OracleCheck c;
    c.partitions = n;
    c.iterations = config.iterations;
    c.maxAbsDiff = maxAbsDiff(trained.finalParams, expected);
    c.pass = c.maxAbsDiff <= kOracleTolerance;
    out.push_back(c);
  }
  return out;
}

CsvTable oracleTable(const std::string& hash, const std::vector<OracleCheck>& checks) {
  CsvTable t(hash, {"partitions", "iterations", "max_abs_diff", "tolerance", "pass"});
  for (const auto& c : checks) {
    t.addRow({std::to_string(c.partitions), std::to_string(c.iterations),
              csvNumber(c.maxAbsDiff), csvNumber(kOracleTolerance), c.pass ? "true" : "false"});
  }
  return t;
}

CommReport cmdBenchComm(std::span<const std::size_t> paramCounts,
                        std::span<const int> partitionCounts, std::uint64_t seed) {
  if (paramCounts.empty() || partitionCounts.empty()) {
    throw InvalidArgument("bench-comm needs K and N values");
  }
  CommReport report;
  for (std::size_t k : paramCounts) {
    for (int n : partitionCounts) {
      TrainingConfig config;
      config.numPartitions = n;
      config.iterations = 2;  // iteration 0's broadcast is read by iteration 1
      config.perTaskBatch = 1;
      config.learningRate = 0.1;
      config.seed = seed;
      config.modelSpec = commModel(k);
      config.loss = nn::Loss::kMse;
      Trainer trainer(config, commSamples(k, std::max<std::size_t>(static_cast<std::size_t>(n), 16)));
      trainer.run();
      const NetworkStats& net = trainer.cluster().network();
      const SliceLayout& layout = trainer.layout();

      CommCell cell;
      cell.params = k;
      cell.partitions = n;
      cell.predictedClosedForm = 2.0 * (n - 1) / n * static_cast<double>(k) * 8.0;
      cell.divisible = k % static_cast<std::size_t>(n) == 0;
      for (int node = 0; node < n; ++node) {
        CommRow r;
        r.params = k;
        r.partitions = n;
        r.node = node;
        r.sliceSize = layout.size(node);
        r.shuffleOut = net.node(node, 0, TrafficPhase::kShuffle).outbound;
        r.broadcastOut = net.node(node, 0, TrafficPhase::kBroadcast).outbound;
        auto all = net.node(node, 0);
        r.outbound = all.outbound;
        r.inbound = all.inbound;
        r.predictedExact =
            n == 1 ? 0 : 8 * (k + static_cast<std::uint64_t>(n - 2) * r.sliceSize);
        r.predictedClosedForm = cell.predictedClosedForm;
        r.ringAllReduce = cell.predictedClosedForm;
        cell.totalOutbound += r.outbound;
        cell.totalInbound += r.inbound;

        auto fail = [&](std::string_view what, double measured, double predicted) {
          report.failures.push_back(fmt::format("K={} N={} node={}: {} measured {} predicted {}",
                                                k, n, node, what, measured, predicted));
        };
        if (r.outbound != r.predictedExact) fail("outbound", r.outbound, r.predictedExact);
        if (r.inbound != r.predictedExact) fail("inbound", r.inbound, r.predictedExact);
        if (cell.divisible && static_cast<double>(r.outbound) != r.predictedClosedForm) {
          fail("outbound vs closed form", r.outbound, r.predictedClosedForm);
        }
        report.rows.push_back(r);
      }
      cell.meanOutbound = static_cast<double>(cell.totalOutbound) / n;
      const std::uint64_t expectedTotal = 16 * static_cast<std::uint64_t>(k) * (n - 1);
      if (cell.totalOutbound != expectedTotal || cell.totalInbound != expectedTotal) {
        report.failures.push_back(fmt::format("K={} N={}: total out {} in {} predicted {}", k, n,
                                              cell.totalOutbound, cell.totalInbound,
                                              expectedTotal));
      }
      report.cells.push_back(cell);
    }
  }
  return report;
}

CsvTable commTable(const std::string& hash, const CommReport& report) {
  CsvTable t(hash, {"k", "n", "node", "slice_size", "shuffle_out_bytes", "broadcast_out_bytes",
                    "outbound_bytes", "inbound_bytes", "predicted_exact_bytes",
                    "predicted_closed_form_bytes", "ring_allreduce_bytes"});
  for (const auto& r : report.rows) {
    t.addRow({std::to_string(r.params), std::to_string(r.partitions), std::to_string(r.node),
              std::to_string(r.sliceSize), std::to_string(r.shuffleOut),
              std::to_string(r.broadcastOut), std::to_string(r.outbound),
              std::to_string(r.inbound), std::to_string(r.predictedExact),
              csvNumber(r.predictedClosedForm), csvNumber(r.ringAllReduce)});
  }
  return t;
}

std::string commHash(std::span<const std::size_t> paramCounts,
                     std::span<const int> partitionCounts, std::uint64_t seed) {
  return hashText(fmt::format("bench-comm k={} n={} seed={}", fmt::join(paramCounts, ","),
                              fmt::join(partitionCounts, ","), seed));
}

SweepParams calibratedSweep() {
  SweepParams p;
  p.taskCounts = {100, 200, 500};
  p.groupSizes = {1, 10};
  p.scheduleCost = SimDuration(0.44);
  p.computeTime = SimDuration(2000.0);
  p.numNodes = 16;
  return p;
}

SchedReport cmdBenchSched(const SweepParams& params) {
  SchedReport r;
  r.rows = runScheduleSweep(params);
  r.violation = findMonotonicityViolation(r.rows);
  return r;
}

CsvTable schedTable(const std::string& hash, const SchedReport& report) {
  CsvTable t(hash, {"task_count", "group_size", "schedule_cost_ms", "compute_ms",
                    "overhead_ms", "overhead_fraction", "events_per_iteration", "makespan_ms"});
  for (const auto& r : report.rows) {
    t.addRow({std::to_string(r.taskCount), std::to_string(r.groupSize), ms(r.scheduleCost),
              ms(r.compute), ms(r.overhead), csvNumber(r.overheadFraction),
              csvNumber(r.eventsPerIteration), ms(r.makespan)});
  }
  return t;
}

std::string schedHash(const SweepParams& p) {
  return hashText(fmt::format("bench-sched tasks={} g={} delta_ms={} compute_ms={} nodes={} "
                              "iterations={}",
                              fmt::join(p.taskCounts, ","), fmt::join(p.groupSizes, ","),
                              p.scheduleCost.count(), p.computeTime.count(), p.numNodes,
                              p.iterations));
}

std::vector<FaultSpec> defaultFaultMatrix(int partitions, std::int64_t iterations) {
  if (iterations < 1) return {};
  const std::int64_t at = std::min<std::int64_t>(10, iterations - 1);
  std::vector<FaultSpec> out;
  for (JobKind kind : {JobKind::kForwardBackward, JobKind::kParameterSync}) {
    for (KillMode mode : {KillMode::kKillBeforeEffects, KillMode::kKillAfterPartialPut}) {
      for (int task : {0, partitions - 1}) {
        FaultSpec f{at, kind, task, mode};
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
      }
    }
  }
  return out;
}

std::vector<DrillCase> cmdFaultDrill(const RunManifest& manifest,
                                     std::span<const FaultSpec> matrix) {
  std::vector<DrillCase> out;
  if (matrix.empty()) return out;
  Workload workload = workloadFor(manifest);
  RunOutput baseline = runWithFaults(manifest, workload, {});
  for (const FaultSpec& fault : matrix) {
    RunOutput run = runWithFaults(manifest, workload, {fault});
    DrillCase c;
    c.fault = fault;
    for (const auto& s : run.result.stats) c.retries += s.retries;
    c.paramsIdentical = encodeParams(run.result.finalParams) ==
                        encodeParams(baseline.result.finalParams);
    c.storeIdentical = run.store == baseline.store;
    if (!c.storeIdentical) {
      for (const auto& [id, blob] : baseline.store) {
        auto it = run.store.find(id);
        if (it == run.store.end() || !(it->second == blob)) {
          c.firstDifference = id.str();
          break;
        }
      }
      if (c.firstDifference.empty()) {
        for (const auto& [id, blob] : run.store) {
          if (!baseline.store.contains(id)) {
            c.firstDifference = id.str();
            break;
          }
        }
      }
    } else if (!c.paramsIdentical) {
      c.firstDifference = "final parameters";
    }
    c.pass = c.paramsIdentical && c.storeIdentical && c.retries >= 1;
    out.push_back(c);
  }
  return out;
}

CsvTable drillTable(const std::string& hash, const std::vector<DrillCase>& cases) {
  CsvTable t(hash, {"iteration", "job_kind", "task", "mode", "retries", "params_identical",
                    "store_identical", "first_difference", "pass"});
  for (const auto& c : cases) {
    t.addRow({std::to_string(c.fault.iteration), std::string(toString(c.fault.jobKind)),
              std::to_string(c.fault.taskId), std::string(toString(c.fault.mode)),
              std::to_string(c.retries), c.paramsIdentical ? "true" : "false",
              c.storeIdentical ? "true" : "false", c.firstDifference,
              c.pass ? "true" : "false"});
  }
  return t;
}

}  // namespace shufflesgd::bench
