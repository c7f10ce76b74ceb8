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

#include "kdnas/runner.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>
#include <vector>

#include "kdnas/errors.h"
#include "kdnas/objective.h"
#include "kdnas/random.h"
#include "kdnas/turbo.h"

namespace kdnas {
namespace {

constexpr std::uint64_t kRandomSearchStream = 4;
constexpr int kCheckpointVersion = 1;

double WallSeconds() {
  return std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void WriteJsonAtomically(const std::filesystem::path& path, const nlohmann::json& j) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << j.dump(1) << '\n';
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// Owns the evaluator and output files of one run directory.
class RunContext {
 public:
  RunContext(const RunConfig& cfg, const std::filesystem::path& dir, HistoryWriter history,
             const RunControl& control)
      : cfg_(cfg),
        dir_(dir),
        history_(std::move(history)),
        timings_(dir / kTimingsFile, std::ios::binary | std::ios::app),
        control_(control),
        evaluator_(cfg.space, cfg.teacher, cfg.epsilon, cfg.latency, cfg.proxy,
                   control.backend_factory ? control.backend_factory(cfg) : MakeBackend(cfg)) {}

  // Evaluates and records a batch; returns the records in batch order.
  std::vector<CandidateRecord> Evaluate(const std::vector<Evaluator::Candidate>& batch,
                                        const std::vector<int>& regions,
                                        const std::vector<bool>& design) {
    const double started = WallSeconds();
    const std::vector<Evaluation> evals = evaluator_.EvaluateBatch(batch);
    const double finished = WallSeconds();
    std::vector<CandidateRecord> out;
    for (std::size_t i = 0; i < evals.size(); ++i) {
      CandidateRecord r;
      r.id = evals[i].id;
      r.status = evals[i].status;
      r.region = regions[i];
      r.design = design[i];
      r.point = batch[i].point;
      r.arch = evals[i].arch;
      r.profile = evals[i].profile;
      r.metrics = evals[i].metrics;
      r.score = evals[i].score;
      r.reason = evals[i].reason;
      history_.Append(r);
      timings_ << nlohmann::json{{"id", r.id}, {"started", started}, {"finished", finished}}.dump()
               << '\n';
      if (control_.log != nullptr && !r.ok()) {
        *control_.log << "candidate " << r.id << " " << ToString(r.status) << ": " << r.reason
                      << '\n';
      }
      out.push_back(std::move(r));
    }
    timings_.flush();
    offset_ = history_.Flush();
    return out;
  }

  std::uintmax_t history_offset() const { return offset_; }
  void set_history_offset(std::uintmax_t offset) { offset_ = offset; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  const RunConfig& cfg_;
  std::filesystem::path dir_;
  HistoryWriter history_;
  std::ofstream timings_;
  const RunControl& control_;
  Evaluator evaluator_;
  std::uintmax_t offset_ = 0;
};

void WriteCheckpoint(RunContext& ctx, const RunConfig& cfg, const TurboOptimizer& opt,
                     std::int64_t evaluated) {
  WriteJsonAtomically(ctx.dir() / kCheckpointFile,
                      {{"version", kCheckpointVersion},
                       {"config", ToJson(cfg)},
                       {"optimizer", opt.Snapshot()},
                       {"history_offset", ctx.history_offset()},
                       {"evaluated", evaluated}});
}

RunSummary Finish(const std::string& mode, const std::filesystem::path& dir,
                  std::int64_t gp_proposals) {
  const HistoryContents h = ReadHistory(dir / kHistoryFile);
  RunSummary s = Summarize(mode, h.records);
  s.corrupt_lines = h.corrupt_lines;
  s.gp_proposals = gp_proposals;
  s.completed = true;
  WriteJsonAtomically(dir / kSummaryFile, ToJson(s));
  return s;
}

RunSummary SearchLoop(const RunConfig& cfg, RunContext& ctx, TurboOptimizer& opt,
                      std::vector<Proposal> batch, std::int64_t evaluated,
                      const RunControl& control) {
  while (!batch.empty()) {
    std::vector<Evaluator::Candidate> cands;
    std::vector<int> regions;
    std::vector<bool> design;
    for (const Proposal& p : batch) {
      cands.push_back({p.id, p.point});
      regions.push_back(p.region);
      design.push_back(p.design);
    }
    const auto records = ctx.Evaluate(cands, regions, design);
    evaluated += static_cast<std::int64_t>(records.size());
    std::vector<Outcome> outcomes;
    for (const auto& r : records) {
      outcomes.push_back({r.id, r.ok() ? std::optional<double>(r.score.score) : std::nullopt});
    }
    const auto remaining = static_cast<std::size_t>(std::max<std::int64_t>(0, cfg.budget - evaluated));
    batch = opt.Step(outcomes, remaining);
    WriteCheckpoint(ctx, cfg, opt, evaluated);
    if (control.log != nullptr) {
      *control.log << "step " << opt.steps() << ": " << evaluated << "/" << cfg.budget
                   << " evaluations, best "
                   << (opt.incumbent() ? opt.incumbent()->value : kFailureScore) << '\n';
    }
    if (control.stop_after_steps && opt.steps() >= *control.stop_after_steps && !batch.empty()) {
      const HistoryContents h = ReadHistory(ctx.dir() / kHistoryFile);
      RunSummary s = Summarize("search", h.records);
      s.corrupt_lines = h.corrupt_lines;
      s.gp_proposals = opt.gp_proposals();
      s.completed = false;
      return s;
    }
  }
  return Finish("search", ctx.dir(), opt.gp_proposals());
}

}  // namespace

nlohmann::json ToJson(const RunSummary& s) {
  nlohmann::json j = {{"mode", s.mode},
                      {"completed", s.completed},
                      {"evaluations", s.evaluations},
                      {"failures", s.failures},
                      {"gp_proposals", s.gp_proposals},
                      {"pareto_size", s.pareto_size},
                      {"corrupt_lines", s.corrupt_lines}};
  if (s.best) {
    j["best"] = {{"id", s.best->id},
                 {"score", s.best->score.score},
                 {"indicator", s.best->score.indicator},
                 {"acc", s.best->metrics.acc_student},
                 {"arch", ToJson(s.best->arch)}};
  } else {
    j["best"] = nullptr;
  }
  return j;
}

std::unique_ptr<AccuracyBackend> MakeBackend(const RunConfig& cfg) {
  if (cfg.backend == BackendKind::kSynthetic) return std::make_unique<SyntheticBackend>();
  SubprocessBackend::Options o;
  o.command = cfg.worker_cmd;
  o.workers = cfg.workers;
  o.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(cfg.timeout_seconds * 1000.0));
  o.max_respawns = cfg.max_respawns;
  return std::make_unique<SubprocessBackend>(o);
}

RunSummary Summarize(const std::string& mode, const std::vector<CandidateRecord>& records) {
  RunSummary s;
  s.mode = mode;
  s.evaluations = static_cast<std::int64_t>(records.size());
  const std::vector<CandidateRecord> ok = OkRecords(records);
  s.failures = s.evaluations - static_cast<std::int64_t>(ok.size());
  for (const auto& r : ok) {
    if (!s.best || r.score.score < s.best->score.score) s.best = r;
  }
  std::vector<Metrics> metrics;
  for (const auto& r : ok) metrics.push_back(r.metrics);
  s.pareto_size = ParetoFrontIndices(metrics).size();
  return s;
}

EncodedPoint RandomSearchPoint(std::uint64_t seed, std::int64_t index, std::size_t dims) {
  std::mt19937_64 rng(DeriveSeed(seed, {kRandomSearchStream, static_cast<std::uint64_t>(index)}));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(dims);
  for (double& v : x) v = u(rng);
  return EncodedPoint(std::move(x));
}

RunSummary RunSearch(const RunConfig& cfg, const RunControl& control) {
  std::filesystem::create_directories(cfg.out_dir);
  std::filesystem::remove(cfg.out_dir / kTimingsFile);
  std::filesystem::remove(cfg.out_dir / kSummaryFile);
  RunContext ctx(cfg, cfg.out_dir, HistoryWriter::Create(cfg.out_dir / kHistoryFile, "search"),
                 control);
  ctx.set_history_offset(std::filesystem::file_size(cfg.out_dir / kHistoryFile));
  TurboOptimizer opt(cfg.optimizer, cfg.space.dimensionality());
  auto batch = opt.Step({}, static_cast<std::size_t>(cfg.budget));
  WriteCheckpoint(ctx, cfg, opt, 0);
  return SearchLoop(cfg, ctx, opt, std::move(batch), 0, control);
}

RunSummary ResumeSearch(const std::filesystem::path& checkpoint, const RunControl& control) {
  std::ifstream in(checkpoint);
  if (!in) throw ConfigError("cannot read checkpoint " + checkpoint.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("version", 0) != kCheckpointVersion) {
    throw ConfigError(checkpoint.string() + ": not a checkpoint");
  }
  const RunConfig cfg = RunConfigFromJson(j.at("config"));
  const std::filesystem::path dir = checkpoint.parent_path();
  const auto offset = j.at("history_offset").get<std::uintmax_t>();
  RunContext ctx(cfg, dir, HistoryWriter::Reopen(dir / kHistoryFile, offset), control);
  ctx.set_history_offset(offset);
  TurboOptimizer opt = TurboOptimizer::Restore(j.at("optimizer"));
  return SearchLoop(cfg, ctx, opt, opt.pending(), j.at("evaluated").get<std::int64_t>(), control);
}

RunSummary RunRandom(const RunConfig& cfg, const RunControl& control) {
  std::filesystem::create_directories(cfg.out_dir);
  std::filesystem::remove(cfg.out_dir / kTimingsFile);
  std::filesystem::remove(cfg.out_dir / kSummaryFile);
  std::filesystem::remove(cfg.out_dir / kCheckpointFile);
  RunContext ctx(cfg, cfg.out_dir, HistoryWriter::Create(cfg.out_dir / kHistoryFile, "random"),
                 control);
  const std::size_t d = cfg.space.dimensionality();
  const auto batch_size = static_cast<std::int64_t>(cfg.optimizer.batch_size);
  for (std::int64_t start = 0; start < cfg.budget; start += batch_size) {
    std::vector<Evaluator::Candidate> cands;
    const std::int64_t end = std::min(cfg.budget, start + batch_size);
    for (std::int64_t i = start; i < end; ++i) {
      cands.push_back({i, RandomSearchPoint(cfg.seed, i, d)});
    }
    ctx.Evaluate(cands, std::vector<int>(cands.size(), -1), std::vector<bool>(cands.size(), false));
  }
  return Finish("random", cfg.out_dir, 0);
}

}  // namespace kdnas
