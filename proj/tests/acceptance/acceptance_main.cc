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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
//
//   kdnas_acceptance [--only NAME]
//   kdnas_acceptance --write-run DIR SEED BUDGET   (child mode, used internally)

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kdnas/cost_model.h"
#include "kdnas/gaussian_process.h"
#include "kdnas/history.h"
#include "kdnas/lhs.h"
#include "kdnas/objective.h"
#include "kdnas/run_config.h"
#include "kdnas/runner.h"
#include "kdnas/search_space.h"
#include "kdnas/sobol.h"
#include "kdnas/trust_region.h"
#include "oracles.h"

extern char** environ;

namespace kdnas {
namespace {

namespace fs = std::filesystem;

std::string self_path;

// Collects failed checks; an empty list means the criterion passed.
class Check {
 public:
  void That(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void Note(const std::string& note) { notes_.push_back(note); }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string Str(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("kdnas_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig SyntheticConfig(std::uint64_t seed, std::int64_t budget, const fs::path& out) {
  RunConfig cfg = LoadRunConfig(fs::path(KDNAS_SOURCE_DIR) / "configs" / "synthetic.txt");
  cfg.seed = seed;
  cfg.budget = budget;
  cfg.out_dir = out;
  cfg.Finalize();
  return cfg;
}

pid_t Spawn(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  pid_t pid = 0;
  if (posix_spawn(&pid, argv[0], nullptr, nullptr, argv.data(), environ) != 0) return -1;
  return pid;
}

int Wait(pid_t pid) {
  int status = 0;
  waitpid(pid, &status, 0);
  return status;
}

std::size_t LineCount(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

void OptimizerBeatsRandom(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> search_best, random_best;
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = RunSearch(SyntheticConfig(seed, 200, Scratch("beats_search")));
    const auto r = RunRandom(SyntheticConfig(seed, 200, Scratch("beats_random")));
    const double sb = s.best ? s.best->score.score : kFailureScore;
    const double rb = r.best ? r.best->score.score : kFailureScore;
    search_best.push_back(sb);
    random_best.push_back(rb);
    if (sb <= rb) ++wins;
    c.Note("seed " + std::to_string(seed) + ": search " + Str(sb) + ", random " + Str(rb));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[4] + v[5]);
  };
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double ms = median(search_best), mr = median(random_best);
  c.Note("wins " + std::to_string(wins) + "/10, median search " + Str(ms) + ", median random " +
         Str(mr) + ", " + Str(seconds) + " s");
  c.That(wins >= 8, "search won only " + std::to_string(wins) + "/10 seeds");
  c.That(ms < mr, "median best score not strictly lower");
  c.That(seconds < 300.0, "took " + Str(seconds) + " s");
}

void TrustRegionTrajectory(Check& c) {
  OptimizerConfig cfg;
  TrustRegionState s = TrustRegionState::Fresh(cfg);
  s.status = RegionStatus::kActive;
  s.center = EncodedPoint({0.5});
  s.incumbent = 100.0;
  double value = 100.0;
  std::vector<double> lengths;
  std::vector<RegionStatus> status;
  for (char step : std::string("SFSSFFFFFFFF")) {
    if (step == 'S') value -= 1.0;
    s = TrUpdate(s, Observation{EncodedPoint({0.25}), step == 'S' ? value : value + 5.0});
    lengths.push_back(s.length);
    status.push_back(s.status);
  }
  const std::vector<double> expected{0.4, 0.4, 0.4, 0.8, 0.8, 0.4, 0.4, 0.2, 0.2, 0.1, 0.1, 0.4};
  c.That(lengths == expected, "length trajectory differs");
  for (std::size_t i = 0; i + 1 < status.size(); ++i) {
    c.That(status[i] == RegionStatus::kActive, "restarted early at step " + std::to_string(i));
  }
  c.That(status.back() == RegionStatus::kRestarting, "no restart after the final failures");
  c.That(s.restarts == 1 && s.observations.empty(), "restart did not reset the region");
}

void GpInterpolation(Check& c) {
  const auto pts = LatinHypercube(5, 3, 21);
  Eigen::MatrixXd x(5, 3);
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = pts[i][j];
    y(i) = std::sin(3.0 * x(i, 0)) + x(i, 1) * x(i, 1) - 0.5 * std::cos(2.0 * x(i, 2));
  }
  GpFitOptions opts;
  opts.noise_floor = 1e-8;
  opts.fit_noise = false;
  const auto gp = GaussianProcess::Fit(x, y, opts);
  const auto post = gp.Predict(x);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    worst = std::max(worst, std::abs(post.mean(i) - y(i)));
    c.That(post.variance(i) <= gp.noise_variance() + 1e-8,
           "variance " + Str(post.variance(i)) + " at training input " + std::to_string(i));
  }
  c.Note("max |mean - y| = " + Str(worst));
  c.That(worst <= 1e-6, "interpolation error " + Str(worst));
}

void EncodingBijection(Check& c) {
  const auto space = SearchSpaceDef::Default();
  int bad = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto arch = RandomArch(space, seed);
    if (Decode(space, Encode(space, arch)) != arch) ++bad;
  }
  c.That(bad == 0, std::to_string(bad) + " of 10000 architectures did not round-trip");
}

void ParetoCorrectness(Check& c) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> grid(0, 9);
  std::vector<Metrics> m;
  for (int i = 0; i < 1000; ++i) {
    m.push_back({grid(rng) / 10.0, 1 + grid(rng), 1 + grid(rng), grid(rng) / 1000.0});
  }
  const auto fast = ParetoFrontIndices(m);
  const auto slow = oracle::ParetoBruteForce(m);
  c.Note(std::to_string(slow.size()) + " non-dominated records");
  c.That(fast == slow, "front differs from the brute-force oracle");
}

void ScoreArithmetic(Check& c) {
  const TeacherBudget t{1000, 1000, 1.0, 0.80};
  auto score = [&](double acc) { return KdScore({acc, 500, 400, 0.6}, t, 0.01).score; };
  c.That(std::abs(score(0.81) - 0.80 / (0.81 * 1.01) * 1.5) <= 1e-9, "above-target example");
  c.That(std::abs(score(0.79) - 0.80 / (0.79 * 0.01) * 1.5) <= 1e-9, "below-target example");
  const TeacherBudget same{1234, 98765, 0.25, 0.7};
  const double eq = KdScore({0.7, 1234, 98765, 0.25}, same, 0.01).score;
  c.That(std::abs(eq - 3.0 / 1.01) <= 1e-9, "student-equals-teacher example");
  const double ratio = score(0.80) / score(std::nextafter(0.80, 0.0));
  c.Note("jump ratio " + Str(ratio));
  c.That(std::abs(ratio - 0.01 / 1.01) <= 1e-12, "jump ratio at the target boundary");
}

ConvSlotSpec Slot(BlockKind kind, int layers, int kernel, double se, int e, int out, int stride) {
  ConvSlotSpec s;
  s.kind = kind;
  s.layers = layers;
  s.kernel = kernel;
  s.se_ratio = se;
  s.expansion = e;
  s.out_channels = out;
  s.stride = stride;
  return s;
}

void CostModelOracle(Check& c) {
  auto same = [&](const ResourceProfile& p, const oracle::Counts& o, const std::string& what) {
    c.That(p.params == o.params && p.flops == o.flops && p.layers == o.layers, what);
  };
  const auto pw = ConvCost({2, 2, 4}, 1, 8, 1, 1, false).profile;
  c.That(pw.params == 32 && pw.flops == 256, "pointwise example values");
  same(pw, oracle::EnumerateConv(2, 2, 4, 8, 1, 1, 1, false), "pointwise conv");
  const auto dw = ConvCost({4, 4, 32}, 3, 32, 1, 32, false).profile;
  c.That(dw.params == 288, "depthwise example values");
  same(dw, oracle::EnumerateConv(4, 4, 32, 32, 3, 1, 32, false), "depthwise conv");
  same(ConvCost({9, 9, 16}, 5, 24, 2, 1, true).profile,
       oracle::EnumerateConv(9, 9, 16, 24, 5, 2, 1, true), "strided conv with bias");
  for (const auto& slot : {Slot(BlockKind::kMBConv, 1, 3, 0.25, 4, 8, 1),
                           Slot(BlockKind::kMBConv, 3, 5, 0.25, 4, 24, 2),
                           Slot(BlockKind::kMBConv, 2, 3, 0.0, 1, 16, 1)}) {
    oracle::Shape s{9, 9, 16};
    same(MBConvCost({9, 9, 16}, slot).profile, oracle::MBConvLayers(&s, slot), "MBConv");
  }
  for (const auto& slot : {Slot(BlockKind::kFusedMBConv, 1, 3, 0.0, 1, 32, 1),
                           Slot(BlockKind::kFusedMBConv, 2, 3, 0.25, 4, 48, 2)}) {
    oracle::Shape s{7, 7, 16};
    same(FusedMBConvCost({7, 7, 16}, slot).profile, oracle::FusedMBConvLayers(&s, slot),
         "Fused-MBConv");
  }
  const TransformerTailSpec tail{1, 128, 4, 4};
  same(TransformerTailCost({4, 4, 96}, tail), oracle::TransformerTail({4, 4, 96}, tail),
       "transformer tail");
  const auto space = SearchSpaceDef::Default();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto arch = RandomArch(space, seed);
    same(Profile(space, arch), oracle::Network(space, arch),
         "whole network, seed " + std::to_string(seed));
  }
}

void SobolAndLhs(Check& c) {
  const auto pts = SobolPoints(1, 3);
  c.That(pts.size() == 3 && pts[0][0] == 0.5 && pts[1][0] == 0.75 && pts[2][0] == 0.25,
         "first one-dimensional Sobol points");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto lhs = LatinHypercube(50, 53, seed);
    for (std::size_t j = 0; j < 53; ++j) {
      std::vector<int> count(50, 0);
      for (const auto& p : lhs) {
        const auto bin = static_cast<std::size_t>(std::floor(p[j] * 50.0));
        if (bin < 50) ++count[bin];
      }
      const bool ok = std::all_of(count.begin(), count.end(), [](int n) { return n == 1; });
      c.That(ok, "LHS dimension " + std::to_string(j) + " not stratified, seed " +
                     std::to_string(seed));
    }
  }
}

void DeterminismAndResume(Check& c) {
  const std::int64_t budget = 80;
  // Two separate processes with the same seed.
  const auto a = Scratch("det_a"), b = Scratch("det_b");
  for (const auto& dir : {a, b}) {
    const pid_t pid = Spawn({self_path, "--write-run", dir.string(), "7", std::to_string(budget)});
    const int status = Wait(pid);
    c.That(pid > 0 && WIFEXITED(status) && WEXITSTATUS(status) == 0, "child run failed");
  }
  const std::string reference = Slurp(a / kHistoryFile);
  c.That(LineCount(a / kHistoryFile) == static_cast<std::size_t>(budget) + 1,
         "history has the wrong number of lines");
  c.That(reference == Slurp(b / kHistoryFile), "histories differ across executions");
  c.That(Slurp(a / kSummaryFile) == Slurp(b / kSummaryFile), "summaries differ across executions");

  // A run killed with SIGKILL part-way through, then resumed.
  const auto k = Scratch("det_killed");
  const pid_t pid = Spawn({self_path, "--write-run", k.string(), "7", std::to_string(budget)});
  bool killed = false;
  for (int i = 0; i < 6000 && !killed; ++i) {
    if (fs::exists(k / kCheckpointFile) && LineCount(k / kHistoryFile) >= 45) {
      kill(pid, SIGKILL);
      killed = true;
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  const int status = Wait(pid);
  c.That(killed && WIFSIGNALED(status), "child was not killed mid-run");
  c.Note("killed after " + std::to_string(LineCount(k / kHistoryFile) - 1) + " records");
  const auto resumed = ResumeSearch(k / kCheckpointFile);
  c.That(resumed.completed, "resumed run did not complete");
  c.That(Slurp(k / kHistoryFile) == reference, "resumed history differs from uninterrupted");

  // Stop at every step boundary in turn, corrupting the tail each time.
  const auto p = Scratch("det_stepwise");
  RunControl stop;
  stop.stop_after_steps = 1;
  auto s = RunSearch(SyntheticConfig(7, budget, p), stop);
  while (!s.completed) {
    std::ofstream(p / kHistoryFile, std::ios::app | std::ios::binary) << "{\"id\": 3, \"poi";
    ++*stop.stop_after_steps;
    s = ResumeSearch(p / kCheckpointFile, stop);
  }
  c.That(Slurp(p / kHistoryFile) == reference, "stepwise-resumed history differs");
}

struct Criterion {
  std::string name;
  std::function<void(Check&)> run;
};

}  // namespace
}  // namespace kdnas

int main(int argc, char** argv) {
  using namespace kdnas;
  self_path = fs::absolute(argv[0]).string();
  const std::vector<std::string> args(argv + 1, argv + argc);
  if (args.size() == 4 && args[0] == "--write-run") {
    RunSearch(SyntheticConfig(std::stoull(args[2]), std::stoll(args[3]), args[1]));
    return 0;
  }
  std::string only;
  if (args.size() == 2 && args[0] == "--only") only = args[1];

  const std::vector<Criterion> criteria = {
      {"optimizer_beats_random", OptimizerBeatsRandom},
      {"trust_region_trajectory", TrustRegionTrajectory},
      {"gp_interpolation", GpInterpolation},
      {"encoding_bijection", EncodingBijection},
      {"pareto_correctness", ParetoCorrectness},
      {"score_arithmetic", ScoreArithmetic},
      {"cost_model_oracle", CostModelOracle},
      {"sobol_lhs", SobolAndLhs},
      {"determinism_and_resume", DeterminismAndResume},
  };
  int failed = 0, ran = 0;
  for (const auto& criterion : criteria) {
    if (!only.empty() && criterion.name != only) continue;
    ++ran;
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.That(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& note : check.notes()) std::cout << "  " << criterion.name << ": " << note << "\n";
    if (check.failures().empty()) {
      std::cout << "PASS " << criterion.name << " (" << Str(secs) << " s)\n";
    } else {
      ++failed;
      std::cout << "FAIL " << criterion.name << ": " << check.failures().front();
      if (check.failures().size() > 1) std::cout << " (+" << check.failures().size() - 1 << " more)";
      std::cout << "\n";
    }
    std::cout.flush();
  }
  if (ran == 0) {
    std::cerr << "no criterion named '" << only << "'\n";
    return 2;
  }
  std::cout << (failed == 0 ? "all " + std::to_string(ran) + " criteria passed"
                            : std::to_string(failed) + " of " + std::to_string(ran) +
                                  " criteria failed")
            << "\n";
  return failed == 0 ? 0 : 1;
}
