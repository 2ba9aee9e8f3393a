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

#include "shufflesgd/bench/workloads.h"

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"
#include "shufflesgd/common/philox.h"
#include "shufflesgd/train/batch.h"

namespace shufflesgd::bench {

namespace {

constexpr std::size_t kXorSamples = 256;
constexpr double kXorNoise = 0.1;
constexpr std::size_t kLinRegDim = 8;
constexpr std::size_t kLinRegSamples = 512;
constexpr std::size_t kNcfUsers = 16;
constexpr std::size_t kNcfItems = 16;
constexpr std::size_t kNcfRank = 2;
constexpr std::size_t kNcfSamples = 1024;

Workload xorMlp(std::uint64_t seed) {
  Workload w;
  w.kind = WorkloadKind::kXorMlp;
  w.spec = nn::Sequential({nn::Linear(2, 8), nn::Sigmoid(), nn::Linear(8, 1), nn::Sigmoid()});
  w.loss = nn::Loss::kMse;
  CounterRng rng(seed, RngPurpose::kData, static_cast<std::uint32_t>(WorkloadKind::kXorMlp));
  std::uint64_t draw = 0;
  for (std::size_t r = 0; r < kXorSamples; ++r) {
    int a = static_cast<int>(r & 1);
    int b = static_cast<int>((r >> 1) & 1);
    double x0 = a + kXorNoise * rng.normal(draw++);
    double x1 = b + kXorNoise * rng.normal(draw++);
    w.samples.push_back({x0, x1, static_cast<double>(a ^ b)});
  }
  return w;
}

Workload linReg(std::uint64_t seed) {
  Workload w;
  w.kind = WorkloadKind::kLinReg;
  w.spec = nn::Linear(kLinRegDim, 1);
  w.loss = nn::Loss::kMse;
  CounterRng rng(seed, RngPurpose::kData, static_cast<std::uint32_t>(WorkloadKind::kLinReg));
  std::uint64_t draw = 0;
  for (std::size_t j = 0; j <= kLinRegDim; ++j) w.planted.push_back(2.0 * rng.uniform(draw++) - 1.0);
  for (std::size_t r = 0; r < kLinRegSamples; ++r) {
    Record rec;
    double y = w.planted[kLinRegDim];
    for (std::size_t j = 0; j < kLinRegDim; ++j) {
      double x = 2.0 * rng.uniform(draw++) - 1.0;
      rec.push_back(x);
      y += w.planted[j] * x;
    }
    rec.push_back(y);
    w.samples.push_back(std::move(rec));
  }
  return w;
}

Workload toyNcf(std::uint64_t seed) {
  Workload w;
  w.kind = WorkloadKind::kToyNcf;
  w.spec = nn::Sequential({nn::Embedding(kNcfUsers + kNcfItems, 8, 2), nn::Linear(16, 16),
                           nn::ReLU(), nn::Linear(16, 1)});
  w.loss = nn::Loss::kBce;
  CounterRng rng(seed, RngPurpose::kData, static_cast<std::uint32_t>(WorkloadKind::kToyNcf));
  std::uint64_t draw = 0;
  std::vector<double> users(kNcfUsers * kNcfRank);
  std::vector<double> items(kNcfItems * kNcfRank);
  for (double& v : users) v = rng.normal(draw++);
  for (double& v : items) v = rng.normal(draw++);
  for (std::size_t r = 0; r < kNcfSamples; ++r) {
    std::size_t u = rng.below(draw++, kNcfUsers);
    std::size_t i = rng.below(draw++, kNcfItems);
    double affinity = 0.0;
    for (std::size_t k = 0; k < kNcfRank; ++k) {
      affinity += users[u * kNcfRank + k] * items[i * kNcfRank + k];
    }
    w.samples.push_back({static_cast<double>(u), static_cast<double>(kNcfUsers + i),
                         affinity > 0.0 ? 1.0 : 0.0});
  }
  return w;
}

}  // namespace

std::string_view toString(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::kXorMlp:
      return "xor_mlp";
    case WorkloadKind::kLinReg:
      return "lin_reg";
    case WorkloadKind::kToyNcf:
      return "toy_ncf";
  }
  return "?";
}

WorkloadKind parseWorkload(std::string_view text) {
  for (WorkloadKind k : kAllWorkloads) {
    if (toString(k) == text) return k;
  }
  throw InvalidArgument(fmt::format("unknown workload '{}'", text));
}

Workload makeWorkload(WorkloadKind kind, std::uint64_t seed) {
  switch (kind) {
    case WorkloadKind::kXorMlp:
      return xorMlp(seed);
    case WorkloadKind::kLinReg:
      return linReg(seed);
    case WorkloadKind::kToyNcf:
      return toyNcf(seed);
  }
  throw InvalidArgument("unknown workload");
}

double datasetLoss(const Workload& workload, std::span<const double> params) {
  const std::size_t in = nn::inputWidth(workload.spec);
  const std::size_t out = nn::outputWidth(workload.spec, in);
  std::vector<std::size_t> all(workload.samples.size());
  for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
  Batch batch = makeBatch(workload.samples, all, in, out);
  nn::ModelReplica replica(workload.spec, {params.begin(), params.end()});
  return nn::lossValue(replica.forward(batch.inputs), batch.targets, workload.loss);
}

nn::LayerSpec commModel(std::size_t paramCount) {
  if (paramCount == 0) throw InvalidArgument("comm model needs at least one parameter");
  return nn::Embedding(paramCount, 1);
}

std::vector<Record> commSamples(std::size_t paramCount, std::size_t count) {
  std::vector<Record> out;
  for (std::size_t r = 0; r < count; ++r) {
    out.push_back({static_cast<double>(r % paramCount), 0.0});
  }
  return out;
}

}  // namespace shufflesgd::bench
