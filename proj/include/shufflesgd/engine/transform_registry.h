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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace shufflesgd {

using Record = std::vector<double>;

// Contents of one materialized partition: either a list of records or, for
// zipped datasets, a pair of co-located parent partitions.
class PartitionData {
 public:
  explicit PartitionData(std::vector<Record> records) : records_(std::move(records)) {}
  PartitionData(std::shared_ptr<const PartitionData> left,
                std::shared_ptr<const PartitionData> right);

  bool zipped() const { return left_ != nullptr; }
  std::span<const Record> records() const { return records_; }
  const PartitionData& left() const;
  const PartitionData& right() const;

  // Canonical little-endian encoding; equal bytes means equal contents.
  std::vector<std::byte> serialize() const;
  std::uint64_t byteSize() const;

 private:
  std::vector<Record> records_;
  std::shared_ptr<const PartitionData> left_;
  std::shared_ptr<const PartitionData> right_;
};

using Partition = std::shared_ptr<const PartitionData>;

// A coarse-grained transformation: whole partition in, whole partition out.
// Must be a pure function of its input.
using Transform = std::function<std::vector<Record>(const PartitionData&)>;

// Transforms are referenced from lineage by a stable string id.
class TransformRegistry {
 public:
  static TransformRegistry& global();

  // Re-registering an id replaces nothing and throws.
  void add(const std::string& id, Transform fn);
  bool contains(const std::string& id) const;
  std::vector<Record> apply(const std::string& id, const PartitionData& input) const;
  std::uint64_t invocations(const std::string& id) const;

 private:
  struct Entry {
    Transform fn;
    mutable std::uint64_t calls = 0;
  };

  mutable std::mutex mu_;
  std::map<std::string, Entry> transforms_;
};

}  // namespace shufflesgd
