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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shufflesgd/bench/workloads.h"
#include "shufflesgd/sim/cluster.h"
#include "shufflesgd/train/config.h"
#include "shufflesgd/train/trainer.h"

namespace shufflesgd::bench {

inline constexpr int kFormatVersion = 1;

// A run description. Text form is one "key = value" per line; '#' starts a
// comment. Keys (defaults in parentheses):
//   format_version (1)          workload (required)
//   partitions (1)              iterations | epochs (exactly one)
//   batch_size (16)             learning_rate (0.1)
//   seed (0)                    data_seed (= seed)
//   aggregation (sum_then_scale_by_n | sum)
//   threads_per_node (1)        schedule_cost_ms (0)
//   group_size (1)              compute_ms (1)
//   byte_latency_ns (0)         update_ns_per_element (0)
//   output_dir ("")
//   fault = iteration,job_kind,task,mode   (repeatable)
struct RunManifest {
  int formatVersion = kFormatVersion;
  WorkloadKind workload = WorkloadKind::kXorMlp;
  int partitions = 1;
  std::optional<std::int64_t> iterations;
  std::optional<double> epochs;
  int batchSize = 16;
  double learningRate = 0.1;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> dataSeed;
  Aggregation aggregation = Aggregation::kSumThenScaleByN;
  int threadsPerNode = 1;
  double scheduleCostMs = 0.0;
  int groupSize = 1;
  double computeMs = 1.0;
  double byteLatencyNs = 0.0;
  double updateNsPerElement = 0.0;
  std::string outputDir;
  std::vector<FaultSpec> faults;
};

RunManifest parseManifest(std::string_view text);
RunManifest loadManifest(const std::filesystem::path& path);

// Canonical text: every key in a fixed order, shortest round-trip numbers.
// output_dir is left out so a run's identity does not depend on where its
// outputs land.
std::string serialize(const RunManifest& manifest);
// FNV-1a of the canonical text, 16 hex digits.
std::string manifestHash(const RunManifest& manifest);

std::string formatFault(const FaultSpec& fault);
FaultSpec parseFault(std::string_view text);

Workload workloadFor(const RunManifest& manifest);
// Epochs resolve to ceil(epochs * |samples| / (partitions * batch_size)).
TrainingConfig trainingConfigFor(const RunManifest& manifest, const Workload& workload);
TrainOptions trainOptionsFor(const RunManifest& manifest);

}  // namespace shufflesgd::bench
