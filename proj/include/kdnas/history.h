// Copyright 2026 The kdnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KDNAS_HISTORY_H_
#define KDNAS_HISTORY_H_

// Run history: one JSON record per line. The first line is a header
// {"format": "kdnas-history", "version": 1, "mode": ...}; each following line
// is a CandidateRecord. Wall-clock times go to a separate timings file so the
// history itself is reproducible byte for byte.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kdnas/cost_model.h"
#include "kdnas/evaluator.h"
#include "kdnas/objective.h"
#include "kdnas/search_space.h"

namespace kdnas {

inline constexpr int kHistoryVersion = 1;
inline constexpr char kHistoryFormat[] = "kdnas-history";

struct CandidateRecord {
  std::int64_t id = 0;
  EvalStatus status = EvalStatus::kFailed;
  int region = -1;  // -1: random search
  bool design = false;
  EncodedPoint point;
  ArchitectureSpec arch;
  ResourceProfile profile;
  Metrics metrics;
  ScoreBreakdown score;
  std::string reason;

  bool ok() const { return status == EvalStatus::kOk; }
};

nlohmann::json ToJson(const CandidateRecord& r);
// Throws std::invalid_argument (or a json exception) on schema violations.
CandidateRecord CandidateRecordFromJson(const nlohmann::json& j);

struct HistoryContents {
  std::string mode;
  std::vector<CandidateRecord> records;
  std::size_t corrupt_lines = 0;
  std::vector<std::string> warnings;
};

// Unparseable or schema-violating lines are skipped and counted. A missing or
// foreign header is a ConfigError.
HistoryContents ReadHistory(const std::filesystem::path& path);

class HistoryWriter {
 public:
  // Starts a new file with a header line.
  static HistoryWriter Create(const std::filesystem::path& path, const std::string& mode);
  // Reopens an existing file, discarding everything past `offset` bytes.
  static HistoryWriter Reopen(const std::filesystem::path& path, std::uintmax_t offset);

  void Append(const CandidateRecord& record);
  // Flushes and returns the file size.
  std::uintmax_t Flush();

 private:
  explicit HistoryWriter(const std::filesystem::path& path);
  std::ofstream out_;
  std::filesystem::path path_;
};

// Records with status ok, in file order.
std::vector<CandidateRecord> OkRecords(const std::vector<CandidateRecord>& records);

}  // namespace kdnas

#endif  // KDNAS_HISTORY_H_
