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

#include "kdnas/report.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>

#include "kdnas/evaluator.h"
#include "kdnas/objective.h"

namespace kdnas {
namespace {

// Shortest text that reads back to the same double.
std::string Num(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::ofstream OpenCsv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<CandidateRecord> ParetoRecords(const std::vector<CandidateRecord>& records) {
  const std::vector<CandidateRecord> ok = OkRecords(records);
  return ParetoFront(std::span<const CandidateRecord>(ok),
                     [](const CandidateRecord& r) { return r.metrics; });
}

std::vector<CurvePoint> BestScoreCurve(const std::vector<CandidateRecord>& records) {
  std::vector<CurvePoint> curve;
  double best = kFailureScore;
  std::int64_t n = 0;
  for (const auto& r : records) {
    ++n;
    if (r.ok()) best = std::min(best, r.score.score);
    curve.push_back({n, best});
  }
  return curve;
}

std::vector<RegionCount> RegionCounts(const std::vector<CandidateRecord>& records) {
  std::map<int, RegionCount> by_region;
  for (const auto& r : records) {
    RegionCount& c = by_region[r.region];
    c.region = r.region;
    ++c.evaluations;
    if (r.design) ++c.design;
    if (!r.ok()) ++c.failures;
  }
  std::vector<RegionCount> out;
  for (const auto& [region, count] : by_region) out.push_back(count);
  return out;
}

ReportFiles WriteReport(const std::filesystem::path& history,
                        const std::filesystem::path& out_dir) {
  const HistoryContents h = ReadHistory(history);
  std::filesystem::create_directories(out_dir);
  ReportFiles files;
  files.pareto = out_dir / "pareto.csv";
  files.curve = out_dir / "curve.csv";
  files.regions = out_dir / "regions.csv";
  files.corrupt_lines = h.corrupt_lines;

  const auto front = ParetoRecords(h.records);
  files.pareto_rows = front.size();
  auto pareto = OpenCsv(files.pareto);
  pareto << "acc,params,flops,latency,s,score,arch_id\n";
  for (const auto& r : front) {
    pareto << Num(r.metrics.acc_student) << ',' << r.metrics.np_student << ','
           << r.metrics.flops_student << ',' << Num(r.metrics.latency_student) << ','
           << Num(r.score.s) << ',' << Num(r.score.score) << ',' << r.id << '\n';
  }

  auto curve = OpenCsv(files.curve);
  curve << "evaluations,best_score\n";
  for (const auto& p : BestScoreCurve(h.records)) {
    curve << p.evaluations << ',' << Num(p.best_score) << '\n';
  }

  auto regions = OpenCsv(files.regions);
  regions << "region,evaluations,design,failures\n";
  for (const auto& c : RegionCounts(h.records)) {
    regions << (c.region < 0 ? std::string("random") : std::to_string(c.region)) << ','
            << c.evaluations << ',' << c.design << ',' << c.failures << '\n';
  }
  for (auto* f : {&pareto, &curve, &regions}) {
    f->flush();
    if (!*f) throw std::runtime_error("writing report files failed");
  }
  return files;
}

}  // namespace kdnas
