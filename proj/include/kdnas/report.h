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

#ifndef KDNAS_REPORT_H_
#define KDNAS_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kdnas/history.h"

namespace kdnas {

struct CurvePoint {
  std::int64_t evaluations = 0;
  double best_score = 0.0;  // running minimum over ok records so far
};

struct RegionCount {
  int region = -1;
  std::int64_t evaluations = 0;
  std::int64_t design = 0;
  std::int64_t failures = 0;
};

// Non-dominated ok records, in history order.
std::vector<CandidateRecord> ParetoRecords(const std::vector<CandidateRecord>& records);
// One point per record; before the first ok record the best score is
// kFailureScore.
std::vector<CurvePoint> BestScoreCurve(const std::vector<CandidateRecord>& records);
std::vector<RegionCount> RegionCounts(const std::vector<CandidateRecord>& records);

struct ReportFiles {
  std::filesystem::path pareto;   // acc,params,flops,latency,s,score,arch_id
  std::filesystem::path curve;    // evaluations,best_score
  std::filesystem::path regions;  // region,evaluations,design,failures
  std::size_t pareto_rows = 0;
  std::size_t corrupt_lines = 0;
};

// Reads a history and writes the three CSV files into out_dir.
ReportFiles WriteReport(const std::filesystem::path& history,
                        const std::filesystem::path& out_dir);

}  // namespace kdnas

#endif  // KDNAS_REPORT_H_
