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

#include "shufflesgd/engine/transform_registry.h"

#include <bit>

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"

namespace shufflesgd {

namespace {

void appendLe64(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xffU));
}

void serializeInto(const PartitionData& p, std::vector<std::byte>& out) {
  if (p.zipped()) {
    appendLe64(out, 1);
    serializeInto(p.left(), out);
    serializeInto(p.right(), out);
    return;
  }
  appendLe64(out, 0);
  appendLe64(out, p.records().size());
  for (const Record& r : p.records()) {
    appendLe64(out, r.size());
    for (double v : r) appendLe64(out, std::bit_cast<std::uint64_t>(v));
  }
}

}  // namespace

PartitionData::PartitionData(std::shared_ptr<const PartitionData> left,
                             std::shared_ptr<const PartitionData> right)
    : left_(std::move(left)), right_(std::move(right)) {
  if (!left_ || !right_) throw InvalidArgument("PartitionData: zipped sides must be non-null");
}

const PartitionData& PartitionData::left() const {
  if (!zipped()) throw InvalidArgument("PartitionData::left on a non-zipped partition");
  return *left_;
}

const PartitionData& PartitionData::right() const {
  if (!zipped()) throw InvalidArgument("PartitionData::right on a non-zipped partition");
  return *right_;
}

std::vector<std::byte> PartitionData::serialize() const {
  std::vector<std::byte> out;
  serializeInto(*this, out);
  return out;
}

std::uint64_t PartitionData::byteSize() const {
  if (zipped()) return 8 + left_->byteSize() + right_->byteSize();
  std::uint64_t n = 16;
  for (const Record& r : records_) n += 8 + 8 * r.size();
  return n;
}

TransformRegistry& TransformRegistry::global() {
  static TransformRegistry registry;
  return registry;
}

void TransformRegistry::add(const std::string& id, Transform fn) {
  std::lock_guard lock(mu_);
  if (transforms_.contains(id)) {
    throw InvalidArgument(fmt::format("transform '{}' is already registered", id));
  }
  transforms_.emplace(id, Entry{std::move(fn), 0});
}

bool TransformRegistry::contains(const std::string& id) const {
  std::lock_guard lock(mu_);
  return transforms_.contains(id);
}

std::vector<Record> TransformRegistry::apply(const std::string& id,
                                             const PartitionData& input) const {
  Transform fn;
  {
    std::lock_guard lock(mu_);
    auto it = transforms_.find(id);
    if (it == transforms_.end()) {
      throw InvalidArgument(fmt::format("unknown transform '{}'", id));
    }
    ++it->second.calls;
    fn = it->second.fn;
  }
  return fn(input);
}

std::uint64_t TransformRegistry::invocations(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = transforms_.find(id);
  return it == transforms_.end() ? 0 : it->second.calls;
}

}  // namespace shufflesgd
