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
#include <string>
#include <vector>

namespace shufflesgd::bench {

// CSV table whose first line is "# format_version=<v> manifest_hash=<h>",
// followed by the header row. Fields are written verbatim; callers pass
// numbers formatted with csvNumber for bit-stable output.
class CsvTable {
 public:
  CsvTable(std::string manifestHash, std::vector<std::string> header);

  void addRow(std::vector<std::string> row);
  std::string str() const;
  void write(const std::filesystem::path& path) const;

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

 private:
  std::string hash_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Shortest representation that round-trips.
std::string csvNumber(double value);

void writeTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace shufflesgd::bench
