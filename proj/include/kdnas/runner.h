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

#ifndef KDNAS_RUNNER_H_
#define KDNAS_RUNNER_H_

// Search orchestration. A run directory holds:
//   history.jsonl    every evaluated candidate, append-only
//   timings.jsonl    wall-clock start/finish per evaluation attempt
//   checkpoint.json  optimizer snapshot + history offset, rewritten per step
//   summary.json     written when the budget is exhausted

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "kdnas/evaluator.h"
#include "kdnas/history.h"
#include "kdnas/run_config.h"

namespace kdnas {

inline constexpr char kHistoryFile[] = "history.jsonl";
inline constexpr char kTimingsFile[] = "timings.jsonl";
inline constexpr char kCheckpointFile[] = "checkpoint.json";
inline constexpr char kSummaryFile[] = "summary.json";

struct RunControl {
  // Return after this many optimizer steps, leaving a resumable checkpoint.
  std::optional<std::int64_t> stop_after_steps;
  // Replaces the backend chosen by the config.
  std::function<std::unique_ptr<AccuracyBackend>(const RunConfig&)> backend_factory;
  std::ostream* log = nullptr;
};

struct RunSummary {
  std::string mode;
  bool completed = false;
  std::int64_t evaluations = 0;
  std::int64_t failures = 0;
  std::int64_t gp_proposals = 0;
  std::optional<CandidateRecord> best;  // lowest score among ok records
  std::size_t pareto_size = 0;
  std::size_t corrupt_lines = 0;  // history lines skipped as unreadable
};

nlohmann::json ToJson(const RunSummary& s);

std::unique_ptr<AccuracyBackend> MakeBackend(const RunConfig& cfg);

// Builds the summary from a finished (or partial) history.
RunSummary Summarize(const std::string& mode, const std::vector<CandidateRecord>& records);

RunSummary RunSearch(const RunConfig& cfg, const RunControl& control = {});
RunSummary RunRandom(const RunConfig& cfg, const RunControl& control = {});
// Continues a search from its checkpoint. Records written after the
// checkpoint are discarded and the in-flight batch is evaluated again.
RunSummary ResumeSearch(const std::filesystem::path& checkpoint, const RunControl& control = {});

// The i-th point of the random baseline.
EncodedPoint RandomSearchPoint(std::uint64_t seed, std::int64_t index, std::size_t dims);

}  // namespace kdnas

#endif  // KDNAS_RUNNER_H_
