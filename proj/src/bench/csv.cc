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

#include "shufflesgd/bench/csv.h"

#include <fstream>

#include <fmt/format.h>

#include "shufflesgd/bench/manifest.h"
#include "shufflesgd/common/errors.h"

namespace shufflesgd::bench {

CsvTable::CsvTable(std::string manifestHash, std::vector<std::string> header)
    : hash_(std::move(manifestHash)), header_(std::move(header)) {}

void CsvTable::addRow(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw InvalidArgument(fmt::format("CSV row has {} fields, header has {}", row.size(),
                                      header_.size()));
  }
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out = fmt::format("# format_version={} manifest_hash={}\n", kFormatVersion, hash_);
  out += fmt::format("{}\n", fmt::join(header_, ","));
  for (const auto& row : rows_) out += fmt::format("{}\n", fmt::join(row, ","));
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { writeTextFile(path, str()); }

std::string csvNumber(double value) { return fmt::format("{}", value); }

void writeTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
  out << text;
  if (!out) throw Error(fmt::format("failed writing {}", path.string()));
}

}  // namespace shufflesgd::bench
