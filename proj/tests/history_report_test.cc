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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "kdnas/errors.h"
#include "kdnas/history.h"
#include "kdnas/report.h"
#include "oracles.h"

namespace kdnas {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("kdnas_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CandidateRecord MakeRecord(std::int64_t id, std::mt19937_64& rng, int region = 0) {
  const auto space = SearchSpaceDef::Default();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CandidateRecord r;
  r.id = id;
  r.status = EvalStatus::kOk;
  r.region = region;
  r.design = id % 3 == 0;
  std::vector<double> x(Dimensionality(space));
  for (double& v : x) v = u(rng);
  r.point = EncodedPoint(x);
  r.arch = Decode(space, r.point);
  r.profile = Profile(space, r.arch);
  // Coarse grids make ties and duplicates common.
  r.metrics = {std::floor(u(rng) * 10) / 10, 1 + static_cast<std::int64_t>(u(rng) * 8),
               1 + static_cast<std::int64_t>(u(rng) * 8), std::floor(u(rng) * 8) / 1000};
  r.score = {u(rng), 0, u(rng) * 100};
  return r;
}

std::vector<std::string> Lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(HistoryTest, RecordRoundTripIsExact) {
  std::mt19937_64 rng(3);
  auto r = MakeRecord(42, rng, 2);
  r.metrics.acc_student = 0.1 + 0.2;  // not representable as a short decimal
  const auto back = CandidateRecordFromJson(nlohmann::json::parse(ToJson(r).dump()));
  EXPECT_EQ(back.id, r.id);
  EXPECT_EQ(back.region, 2);
  EXPECT_EQ(back.design, r.design);
  EXPECT_EQ(back.point, r.point);
  EXPECT_EQ(back.arch, r.arch);
  EXPECT_EQ(back.metrics, r.metrics);
  EXPECT_EQ(back.score, r.score);
  EXPECT_EQ(back.profile.params, r.profile.params);
  EXPECT_EQ(ToJson(back).dump(), ToJson(r).dump());

  r.status = EvalStatus::kTimeout;
  r.reason = "worker timed out";
  const auto t = CandidateRecordFromJson(ToJson(r));
  EXPECT_EQ(t.status, EvalStatus::kTimeout);
  EXPECT_EQ(t.reason, "worker timed out");
}

TEST(HistoryTest, WriteReadAndCorruptLines) {
  const auto dir = TempDir("history_rw");
  const auto path = dir / "history.jsonl";
  std::mt19937_64 rng(5);
  std::vector<CandidateRecord> written;
  {
    auto w = HistoryWriter::Create(path, "search");
    for (int i = 0; i < 5; ++i) {
      written.push_back(MakeRecord(i, rng));
      w.Append(written.back());
    }
    w.Flush();
  }
  {
    std::ofstream out(path, std::ios::app);
    out << "{\"id\": 99, \"status\": \"ok\"}\n";  // schema violation
    out << "not json at all\n";
    out << "{\"id\": 100, \"sta";                  // torn final write
  }
  const auto h = ReadHistory(path);
  EXPECT_EQ(h.mode, "search");
  ASSERT_EQ(h.records.size(), 5u);
  EXPECT_EQ(h.corrupt_lines, 3u);
  EXPECT_FALSE(h.warnings.empty());
  for (int i = 0; i < 5; ++i) EXPECT_EQ(ToJson(h.records[i]).dump(), ToJson(written[i]).dump());
}

TEST(HistoryTest, HeaderProblemsAreConfigErrors) {
  const auto dir = TempDir("history_header");
  EXPECT_THROW(ReadHistory(dir / "missing.jsonl"), ConfigError);
  const auto empty = dir / "empty.jsonl";
  std::ofstream(empty).close();
  EXPECT_THROW(ReadHistory(empty), ConfigError);
  const auto foreign = dir / "foreign.jsonl";
  std::ofstream(foreign) << "{\"format\": \"other\", \"version\": 1}\n";
  EXPECT_THROW(ReadHistory(foreign), ConfigError);
  const auto future = dir / "future.jsonl";
  std::ofstream(future) << "{\"format\": \"kdnas-history\", \"version\": 2, \"mode\": \"search\"}\n";
  EXPECT_THROW(ReadHistory(future), ConfigError);
}

TEST(HistoryTest, ReopenDiscardsBytesPastOffset) {
  const auto path = TempDir("history_reopen") / "history.jsonl";
  std::mt19937_64 rng(8);
  std::uintmax_t offset = 0;
  {
    auto w = HistoryWriter::Create(path, "search");
    w.Append(MakeRecord(0, rng));
    offset = w.Flush();
    w.Append(MakeRecord(1, rng));
    w.Flush();
  }
  std::ofstream(path, std::ios::app) << "{\"partial";
  {
    auto w = HistoryWriter::Reopen(path, offset);
    w.Append(MakeRecord(7, rng));
    w.Flush();
  }
  const auto h = ReadHistory(path);
  EXPECT_EQ(h.corrupt_lines, 0u);
  ASSERT_EQ(h.records.size(), 2u);
  EXPECT_EQ(h.records[0].id, 0);
  EXPECT_EQ(h.records[1].id, 7);
}

TEST(ReportTest, ParetoMatchesBruteForce) {
  std::mt19937_64 rng(11);
  std::vector<CandidateRecord> records;
  for (int i = 0; i < 300; ++i) {
    records.push_back(MakeRecord(i, rng));
    if (i % 17 == 0) records.back().status = EvalStatus::kFailed;
  }
  const auto ok = OkRecords(records);
  std::vector<Metrics> m;
  for (const auto& r : ok) m.push_back(r.metrics);
  const auto expected = oracle::ParetoBruteForce(m);
  const auto front = ParetoRecords(records);
  ASSERT_EQ(front.size(), expected.size());
  for (std::size_t i = 0; i < front.size(); ++i) EXPECT_EQ(front[i].id, ok[expected[i]].id);
}

TEST(ReportTest, CurveIsNonIncreasingAndStartsAtSentinel) {
  std::mt19937_64 rng(13);
  std::vector<CandidateRecord> records;
  records.push_back(MakeRecord(0, rng));
  records.back().status = EvalStatus::kFailed;
  for (int i = 1; i < 50; ++i) records.push_back(MakeRecord(i, rng));
  const auto curve = BestScoreCurve(records);
  ASSERT_EQ(curve.size(), records.size());
  EXPECT_EQ(curve[0].best_score, kFailureScore);
  EXPECT_EQ(curve[1].best_score, records[1].score.score);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_EQ(curve[i].evaluations, static_cast<std::int64_t>(i + 1));
    EXPECT_LE(curve[i].best_score, curve[i - 1].best_score);
  }
}

TEST(ReportTest, RegionCounts) {
  std::mt19937_64 rng(17);
  std::vector<CandidateRecord> records;
  for (int i = 0; i < 12; ++i) records.push_back(MakeRecord(i, rng, i % 3));
  records[4].status = EvalStatus::kTimeout;
  const auto counts = RegionCounts(records);
  ASSERT_EQ(counts.size(), 3u);
  std::int64_t total = 0;
  for (const auto& c : counts) {
    EXPECT_EQ(c.evaluations, 4);
    EXPECT_EQ(c.failures, c.region == 1 ? 1 : 0);
    total += c.evaluations;
  }
  EXPECT_EQ(total, 12);
}

TEST(ReportTest, WritesCsvFiles) {
  const auto dir = TempDir("report_csv");
  const auto path = dir / "history.jsonl";
  std::mt19937_64 rng(19);
  {
    auto w = HistoryWriter::Create(path, "random");
    for (int i = 0; i < 20; ++i) w.Append(MakeRecord(i, rng, -1));
    w.Flush();
  }
  const auto files = WriteReport(path, dir / "report");
  const auto pareto = Lines(files.pareto);
  ASSERT_FALSE(pareto.empty());
  EXPECT_EQ(pareto[0], "acc,params,flops,latency,s,score,arch_id");
  EXPECT_EQ(pareto.size(), files.pareto_rows + 1);
  const auto curve = Lines(files.curve);
  EXPECT_EQ(curve[0], "evaluations,best_score");
  EXPECT_EQ(curve.size(), 21u);
  const auto regions = Lines(files.regions);
  EXPECT_EQ(regions[0], "region,evaluations,design,failures");
  ASSERT_EQ(regions.size(), 2u);
  EXPECT_EQ(regions[1].substr(0, 10), "random,20,");
}

TEST(ReportTest, SingleRecordHistoryGivesOneParetoRow) {
  const auto dir = TempDir("report_single");
  const auto path = dir / "history.jsonl";
  std::mt19937_64 rng(23);
  {
    auto w = HistoryWriter::Create(path, "search");
    w.Append(MakeRecord(0, rng));
    w.Flush();
  }
  const auto files = WriteReport(path, dir);
  EXPECT_EQ(files.pareto_rows, 1u);
  const auto rows = Lines(files.pareto);
  ASSERT_EQ(rows.size(), 2u);
  // Values survive the CSV round trip.
  std::stringstream ss(rows[1]);
  std::string acc;
  std::getline(ss, acc, ',');
  EXPECT_EQ(std::stod(acc), ReadHistory(path).records[0].metrics.acc_student);
}

}  // namespace
}  // namespace kdnas
