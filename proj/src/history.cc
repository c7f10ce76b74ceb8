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

#include "kdnas/history.h"

#include <cmath>
#include <stdexcept>

#include "kdnas/errors.h"

namespace kdnas {

nlohmann::json ToJson(const CandidateRecord& r) {
  nlohmann::json j = {
      {"id", r.id},
      {"status", ToString(r.status)},
      {"region", r.region},
      {"design", r.design},
      {"point", std::vector<double>(r.point.coords().begin(), r.point.coords().end())},
      {"arch", ToJson(r.arch)},
      {"metrics",
       {{"acc", r.metrics.acc_student},
        {"params", r.metrics.np_student},
        {"flops", r.metrics.flops_student},
        {"latency", r.metrics.latency_student}}},
      {"profile",
       {{"params", r.profile.params},
        {"flops", r.profile.flops},
        {"layers", r.profile.layers},
        {"latency_proxy", r.profile.latency_proxy}}},
      {"score", {{"s", r.score.s}, {"indicator", r.score.indicator}, {"score", r.score.score}}}};
  if (!r.reason.empty()) j["reason"] = r.reason;
  return j;
}

CandidateRecord CandidateRecordFromJson(const nlohmann::json& j) {
  CandidateRecord r;
  r.id = j.at("id").get<std::int64_t>();
  r.status = ParseEvalStatus(j.at("status").get<std::string>());
  r.region = j.at("region").get<int>();
  r.design = j.at("design").get<bool>();
  r.point = EncodedPoint(j.at("point").get<std::vector<double>>());
  r.arch = ArchitectureFromJson(j.at("arch"));
  const auto& m = j.at("metrics");
  r.metrics.acc_student = m.at("acc").get<double>();
  r.metrics.np_student = m.at("params").get<std::int64_t>();
  r.metrics.flops_student = m.at("flops").get<std::int64_t>();
  r.metrics.latency_student = m.at("latency").get<double>();
  const auto& p = j.at("profile");
  r.profile.params = p.at("params").get<std::int64_t>();
  r.profile.flops = p.at("flops").get<std::int64_t>();
  r.profile.layers = p.at("layers").get<std::int64_t>();
  r.profile.latency_proxy = p.at("latency_proxy").get<double>();
  const auto& s = j.at("score");
  r.score.s = s.at("s").get<double>();
  r.score.indicator = s.at("indicator").get<int>();
  r.score.score = s.at("score").get<double>();
  if (j.contains("reason")) r.reason = j.at("reason").get<std::string>();
  if (r.ok() && !std::isfinite(r.score.score)) {
    throw std::invalid_argument("ok record with a non-finite score");
  }
  return r;
}

HistoryContents ReadHistory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read history " + path.string());
  HistoryContents out;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty history");
  const auto header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.is_object() || header.value("format", "") != kHistoryFormat) {
    throw ConfigError(path.string() + ": missing history header");
  }
  if (header.value("version", 0) != kHistoryVersion) {
    throw ConfigError(path.string() + ": unsupported history version");
  }
  out.mode = header.value("mode", "");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.records.push_back(CandidateRecordFromJson(j));
    } catch (const std::exception& e) {
      ++out.corrupt_lines;
      out.warnings.push_back(path.string() + ":" + std::to_string(line_no) + ": skipped (" +
                             e.what() + ")");
    }
  }
  return out;
}

HistoryWriter::HistoryWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary | std::ios::app), path_(path) {
  if (!out_) throw ConfigError("cannot write history " + path.string());
}

HistoryWriter HistoryWriter::Create(const std::filesystem::path& path, const std::string& mode) {
  { std::ofstream truncate(path, std::ios::binary | std::ios::trunc); }
  HistoryWriter w(path);
  const nlohmann::json header = {
      {"format", kHistoryFormat}, {"version", kHistoryVersion}, {"mode", mode}};
  w.out_ << header.dump() << '\n';
  w.Flush();
  return w;
}

HistoryWriter HistoryWriter::Reopen(const std::filesystem::path& path, std::uintmax_t offset) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw ConfigError("cannot reopen history " + path.string());
  if (size < offset) throw ConfigError(path.string() + " is shorter than its checkpoint");
  std::filesystem::resize_file(path, offset);
  return HistoryWriter(path);
}

void HistoryWriter::Append(const CandidateRecord& record) {
  out_ << ToJson(record).dump() << '\n';
}

std::uintmax_t HistoryWriter::Flush() {
  out_.flush();
  if (!out_) throw std::runtime_error("write to " + path_.string() + " failed");
  return std::filesystem::file_size(path_);
}

std::vector<CandidateRecord> OkRecords(const std::vector<CandidateRecord>& records) {
  std::vector<CandidateRecord> out;
  for (const auto& r : records) {
    if (r.ok()) out.push_back(r);
  }
  return out;
}

}  // namespace kdnas
