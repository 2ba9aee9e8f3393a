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

#include "shufflesgd/bench/manifest.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"
#include "shufflesgd/common/hash.h"

namespace shufflesgd::bench {

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename T>
T parseNumber(std::string_view key, std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidArgument(fmt::format("manifest: bad value '{}' for {}", text, key));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw InvalidArgument(fmt::format("manifest: non-finite value for {}", key));
    }
  }
  return value;
}

std::vector<std::string_view> splitComma(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    auto pos = s.find(',');
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

JobKind parseJobKind(std::string_view text) {
  if (text == toString(JobKind::kForwardBackward)) return JobKind::kForwardBackward;
  if (text == toString(JobKind::kParameterSync)) return JobKind::kParameterSync;
  throw InvalidArgument(fmt::format("unknown job kind '{}'", text));
}

KillMode parseKillMode(std::string_view text) {
  if (text == toString(KillMode::kKillBeforeEffects)) return KillMode::kKillBeforeEffects;
  if (text == toString(KillMode::kKillAfterPartialPut)) return KillMode::kKillAfterPartialPut;
  throw InvalidArgument(fmt::format("unknown kill mode '{}'", text));
}

}  // namespace

std::string formatFault(const FaultSpec& f) {
  return fmt::format("{},{},{},{}", f.iteration, toString(f.jobKind), f.taskId, toString(f.mode));
}

FaultSpec parseFault(std::string_view text) {
  auto parts = splitComma(text);
  if (parts.size() != 4) {
    throw InvalidArgument(fmt::format("fault '{}' needs iteration,job_kind,task,mode", text));
  }
  FaultSpec f;
  f.iteration = parseNumber<std::int64_t>("fault iteration", parts[0]);
  f.jobKind = parseJobKind(parts[1]);
  f.taskId = parseNumber<int>("fault task", parts[2]);
  f.mode = parseKillMode(parts[3]);
  if (f.iteration < 0 || f.taskId < 0) {
    throw InvalidArgument(fmt::format("fault '{}': iteration and task must be >= 0", text));
  }
  return f;
}

RunManifest parseManifest(std::string_view text) {
  RunManifest m;
  bool haveWorkload = false;
  std::set<std::string, std::less<>> seen;
  std::istringstream in{std::string(text)};
  std::string rawLine;
  int lineNo = 0;
  while (std::getline(in, rawLine)) {
    ++lineNo;
    std::string_view line = rawLine;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument(fmt::format("manifest line {}: expected key = value", lineNo));
    }
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (key != "fault" && !seen.insert(key).second) {
      throw InvalidArgument(fmt::format("manifest line {}: duplicate key {}", lineNo, key));
    }
    if (key == "format_version") {
      m.formatVersion = parseNumber<int>(key, value);
      if (m.formatVersion != kFormatVersion) {
        throw InvalidArgument(fmt::format("unsupported manifest format_version {}",
                                          m.formatVersion));
      }
    } else if (key == "workload") {
      m.workload = parseWorkload(value);
      haveWorkload = true;
    } else if (key == "partitions") {
      m.partitions = parseNumber<int>(key, value);
    } else if (key == "iterations") {
      m.iterations = parseNumber<std::int64_t>(key, value);
    } else if (key == "epochs") {
      m.epochs = parseNumber<double>(key, value);
    } else if (key == "batch_size") {
      m.batchSize = parseNumber<int>(key, value);
    } else if (key == "learning_rate") {
      m.learningRate = parseNumber<double>(key, value);
    } else if (key == "seed") {
      m.seed = parseNumber<std::uint64_t>(key, value);
    } else if (key == "data_seed") {
      m.dataSeed = parseNumber<std::uint64_t>(key, value);
    } else if (key == "aggregation") {
      m.aggregation = parseAggregation(value);
    } else if (key == "threads_per_node") {
      m.threadsPerNode = parseNumber<int>(key, value);
    } else if (key == "schedule_cost_ms") {
      m.scheduleCostMs = parseNumber<double>(key, value);
    } else if (key == "group_size") {
      m.groupSize = parseNumber<int>(key, value);
    } else if (key == "compute_ms") {
      m.computeMs = parseNumber<double>(key, value);
    } else if (key == "byte_latency_ns") {
      m.byteLatencyNs = parseNumber<double>(key, value);
    } else if (key == "update_ns_per_element") {
      m.updateNsPerElement = parseNumber<double>(key, value);
    } else if (key == "output_dir") {
      m.outputDir = std::string(value);
    } else if (key == "fault") {
      m.faults.push_back(parseFault(value));
    } else {
      throw InvalidArgument(fmt::format("manifest line {}: unknown key {}", lineNo, key));
    }
  }
  if (!haveWorkload) throw InvalidArgument("manifest: workload is required");
  if (m.iterations.has_value() == m.epochs.has_value()) {
    throw InvalidArgument("manifest: set exactly one of iterations and epochs");
  }
  if (m.iterations && *m.iterations < 0) throw InvalidArgument("manifest: iterations < 0");
  if (m.epochs && *m.epochs < 0) throw InvalidArgument("manifest: epochs < 0");
  if (m.partitions < 1) throw InvalidArgument("manifest: partitions must be >= 1");
  if (m.batchSize < 1) throw InvalidArgument("manifest: batch_size must be >= 1");
  if (!(m.learningRate > 0)) throw InvalidArgument("manifest: learning_rate must be positive");
  if (m.threadsPerNode < 1) throw InvalidArgument("manifest: threads_per_node must be >= 1");
  if (m.groupSize < 1) throw InvalidArgument("manifest: group_size must be >= 1");
  if (m.scheduleCostMs < 0 || m.computeMs < 0 || m.byteLatencyNs < 0 ||
      m.updateNsPerElement < 0) {
    throw InvalidArgument("manifest: costs must be >= 0");
  }
  return m;
}

RunManifest loadManifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument(fmt::format("cannot read manifest {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parseManifest(ss.str());
}

std::string serialize(const RunManifest& m) {
  std::string out;
  auto line = [&out](std::string_view key, const auto& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  line("format_version", m.formatVersion);
  line("workload", toString(m.workload));
  line("partitions", m.partitions);
  if (m.iterations) line("iterations", *m.iterations);
  if (m.epochs) line("epochs", *m.epochs);
  line("batch_size", m.batchSize);
  line("learning_rate", m.learningRate);
  line("seed", m.seed);
  line("data_seed", m.dataSeed.value_or(m.seed));
  line("aggregation", toString(m.aggregation));
  line("threads_per_node", m.threadsPerNode);
  line("schedule_cost_ms", m.scheduleCostMs);
  line("group_size", m.groupSize);
  line("compute_ms", m.computeMs);
  line("byte_latency_ns", m.byteLatencyNs);
  line("update_ns_per_element", m.updateNsPerElement);
  for (const FaultSpec& f : m.faults) line("fault", formatFault(f));
  return out;
}

std::string manifestHash(const RunManifest& m) {
  Fnv1a64 h;
  h.update(serialize(m));
  return toHex(h.digest());
}

Workload workloadFor(const RunManifest& m) {
  return makeWorkload(m.workload, m.dataSeed.value_or(m.seed));
}

TrainingConfig trainingConfigFor(const RunManifest& m, const Workload& w) {
  TrainingConfig c;
  c.numPartitions = m.partitions;
  if (m.iterations) {
    c.iterations = *m.iterations;
  } else {
    double perIteration = static_cast<double>(m.partitions) * m.batchSize;
    c.iterations =
        static_cast<std::int64_t>(std::ceil(*m.epochs * w.samples.size() / perIteration));
  }
  c.perTaskBatch = m.batchSize;
  c.learningRate = m.learningRate;
  c.seed = m.seed;
  c.aggregation = m.aggregation;
  c.modelSpec = w.spec;
  c.loss = w.loss;
  return c;
}

TrainOptions trainOptionsFor(const RunManifest& m) {
  TrainOptions o;
  o.cluster.numNodes = m.partitions;
  o.cluster.threadsPerNode = m.threadsPerNode;
  o.cluster.scheduleCost = SimDuration(m.scheduleCostMs);
  o.cluster.groupSize = m.groupSize;
  o.cluster.faultPlan = m.faults;
  o.cluster.cost.perRemoteByte = SimDuration(m.byteLatencyNs * 1e-6);
  o.cluster.cost.perUpdatedElement = SimDuration(m.updateNsPerElement * 1e-6);
  o.forwardBackwardCompute = SimDuration(m.computeMs);
  return o;
}

}  // namespace shufflesgd::bench
