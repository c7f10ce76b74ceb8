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

#include "kdnas/turbo.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "kdnas/synthetic.h"

namespace kdnas {
namespace {

double Objective(const EncodedPoint& p) { return 1.01 - SyntheticAccuracy(p); }

OptimizerConfig SmallConfig(std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.n_init = 6;
  cfg.n_regions = 2;
  cfg.batch_size = 3;
  cfg.candidates_per_proposal = 300;
  cfg.seed = seed;
  cfg.gp.restarts = 2;
  cfg.gp.iterations = 25;
  return cfg;
}

std::vector<Outcome> Evaluate(const std::vector<Proposal>& batch) {
  std::vector<Outcome> out;
  for (const auto& p : batch) out.push_back({p.id, Objective(p.point)});
  return out;
}

struct Trace {
  std::vector<Proposal> proposals;
  std::vector<double> incumbents;
};

Trace RunTrace(TurboOptimizer& opt, int evaluations) {
  Trace t;
  auto batch = opt.Step({}, evaluations);
  int used = 0;
  while (!batch.empty()) {
    used += static_cast<int>(batch.size());
    t.proposals.insert(t.proposals.end(), batch.begin(), batch.end());
    batch = opt.Step(Evaluate(batch), evaluations - used);
    t.incumbents.push_back(opt.incumbent()->value);
  }
  return t;
}

TEST(TurboTest, FirstBatchIsTheLatinHypercubeDesign) {
  TurboOptimizer opt(SmallConfig(1), 8);
  const auto batch = opt.Step({}, 1000);
  ASSERT_EQ(batch.size(), 12u);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_TRUE(batch[i].design);
    EXPECT_EQ(batch[i].region, static_cast<int>(i / 6));
    EXPECT_EQ(batch[i].id, static_cast<std::int64_t>(i));
  }
}

TEST(TurboTest, SingleRegionRunsGpProposalsAfterDesign) {
  auto cfg = SmallConfig(2);
  cfg.n_regions = 1;
  TurboOptimizer opt(cfg, 6);
  const auto t = RunTrace(opt, 30);
  ASSERT_EQ(t.proposals.size(), 30u);
  for (const auto& p : t.proposals) EXPECT_EQ(p.region, 0);
  for (std::size_t i = 6; i < t.proposals.size(); ++i) {
    if (!t.proposals[i].design) continue;
    // A design point after the initial one only appears after a restart.
    EXPECT_GE(opt.regions()[0].restarts, 1);
  }
  EXPECT_GT(opt.gp_proposals(), 0);
}

TEST(TurboTest, BudgetOfDesignOnlyMakesNoGpProposals) {
  TurboOptimizer opt(SmallConfig(3), 5);
  const auto t = RunTrace(opt, 12);
  EXPECT_EQ(t.proposals.size(), 12u);
  EXPECT_EQ(opt.gp_proposals(), 0);
}

TEST(TurboTest, IncumbentNeverIncreasesAndPointsStayInCube) {
  TurboOptimizer opt(SmallConfig(4), 10);
  const auto t = RunTrace(opt, 90);
  for (std::size_t i = 1; i < t.incumbents.size(); ++i) {
    EXPECT_LE(t.incumbents[i], t.incumbents[i - 1]);
  }
  for (const auto& p : t.proposals) {
    for (double v : p.point.coords()) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
  for (const auto& r : opt.regions()) {
    if (r.status != RegionStatus::kActive) continue;
    EXPECT_GE(r.length, r.length_min / 2);
    EXPECT_LE(r.length, r.length_max);
  }
}

TEST(TurboTest, IdenticalSeedsGiveIdenticalTrajectories) {
  TurboOptimizer a(SmallConfig(5), 7), b(SmallConfig(5), 7), c(SmallConfig(6), 7);
  const auto ta = RunTrace(a, 45), tb = RunTrace(b, 45), tc = RunTrace(c, 45);
  ASSERT_EQ(ta.proposals.size(), tb.proposals.size());
  for (std::size_t i = 0; i < ta.proposals.size(); ++i) {
    EXPECT_EQ(ta.proposals[i].point, tb.proposals[i].point);
    EXPECT_EQ(ta.proposals[i].region, tb.proposals[i].region);
  }
  EXPECT_NE(ta.proposals.back().point, tc.proposals.back().point);
}

TEST(TurboTest, SnapshotRestoreContinuesIdentically) {
  TurboOptimizer whole(SmallConfig(7), 6);
  const auto reference = RunTrace(whole, 60);

  TurboOptimizer first(SmallConfig(7), 6);
  auto batch = first.Step({}, 60);
  int used = 0;
  std::vector<Proposal> seen;
  for (int step = 0; step < 8; ++step) {
    used += static_cast<int>(batch.size());
    seen.insert(seen.end(), batch.begin(), batch.end());
    batch = first.Step(Evaluate(batch), 60 - used);
  }
  const std::string text = first.Snapshot().dump();
  TurboOptimizer second = TurboOptimizer::Restore(nlohmann::json::parse(text));
  EXPECT_EQ(second.Snapshot().dump(), text);
  batch = second.pending();
  while (!batch.empty()) {
    used += static_cast<int>(batch.size());
    seen.insert(seen.end(), batch.begin(), batch.end());
    batch = second.Step(Evaluate(batch), 60 - used);
  }
  ASSERT_EQ(seen.size(), reference.proposals.size());
  for (std::size_t i = 0; i < seen.size(); ++i) {
    EXPECT_EQ(seen[i].id, reference.proposals[i].id);
    EXPECT_EQ(seen[i].point, reference.proposals[i].point);
  }
}

TEST(TurboTest, RejectsResultsThatDoNotMatchTheBatch) {
  TurboOptimizer opt(SmallConfig(8), 4);
  const auto batch = opt.Step({}, 100);
  auto results = Evaluate(batch);
  auto unknown = results;
  unknown[0].id = 999;
  EXPECT_THROW(opt.Step(unknown, 10), std::invalid_argument);
  auto duplicate = results;
  duplicate[1].id = duplicate[0].id;
  EXPECT_THROW(opt.Step(duplicate, 10), std::invalid_argument);
  auto partial = results;
  partial.pop_back();
  EXPECT_THROW(opt.Step(partial, 10), std::invalid_argument);
  EXPECT_NO_THROW(opt.Step(results, 10));
}

TEST(TurboTest, FailedEvaluationsNeverReachTheSurrogate) {
  TurboOptimizer opt(SmallConfig(9), 5);
  auto batch = opt.Step({}, 100);
  std::vector<Outcome> results;
  for (const auto& p : batch) {
    results.push_back({p.id, p.id % 3 == 0 ? std::nullopt : std::optional(Objective(p.point))});
  }
  batch = opt.Step(results, 100);
  std::size_t observed = 0;
  for (const auto& r : opt.regions()) observed += r.observations.size();
  EXPECT_EQ(observed, 8u);
  EXPECT_FALSE(batch.empty());
}

TEST(TurboTest, RestartingRegionContributesDesignPoints) {
  auto cfg = SmallConfig(10);
  cfg.n_regions = 1;
  cfg.length_min = 0.39;  // the first failure streak forces a restart
  cfg.length_init = 0.4;
  TurboOptimizer opt(cfg, 4);
  auto batch = opt.Step({}, 1000);
  bool restarted = false;
  for (int step = 0; step < 20 && !restarted; ++step) {
    std::vector<Outcome> results;
    for (const auto& p : batch) results.push_back({p.id, 5.0});  // never improves
    batch = opt.Step(results, 1000);
    if (opt.regions()[0].restarts > 0) {
      restarted = true;
      ASSERT_EQ(batch.size(), 6u);
      for (const auto& p : batch) EXPECT_TRUE(p.design);
    }
  }
  EXPECT_TRUE(restarted);
}

TEST(TurboTest, BetterRegionReceivesMostEvaluations) {
  const std::size_t d = 20;
  const auto best = SyntheticOptimum(d);
  OptimizerConfig cfg = SmallConfig(11);
  cfg.n_init = 8;
  cfg.batch_size = 4;
  cfg.candidates_per_proposal = 400;
  TurboOptimizer opt(cfg, d);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  std::vector<EncodedPoint> good, bad;
  for (int i = 0; i < 8; ++i) {
    std::vector<double> g(d), b(d);
    for (std::size_t j = 0; j < d; ++j) {
      g[j] = std::clamp(best[j] + u(rng), 0.0, 1.0);
      b[j] = std::clamp((best[j] < 0.5 ? 0.97 : 0.03) + u(rng), 0.0, 1.0);
    }
    good.emplace_back(g);
    bad.emplace_back(b);
  }
  opt.SetInitialDesign(0, bad);
  opt.SetInitialDesign(1, good);
  auto batch = opt.Step({}, 100000);
  std::array<int, 2> counts{0, 0};
  for (int step = 0; step < 100; ++step) {
    batch = opt.Step(Evaluate(batch), 100000);
    for (const auto& p : batch) ++counts[p.region];
  }
  const double share = static_cast<double>(counts[1]) / (counts[0] + counts[1]);
  EXPECT_GE(share, 0.7) << counts[0] << " vs " << counts[1];
}

TEST(TurboTest, ConfigJsonRoundTrip) {
  auto cfg = SmallConfig(12);
  cfg.log_values = false;
  cfg.gp.noise_floor = 1e-5;
  const auto back = OptimizerConfigFromJson(nlohmann::json::parse(ToJson(cfg).dump()));
  EXPECT_EQ(ToJson(back), ToJson(cfg));
}

TEST(TurboTest, InvalidConfigIsRejected) {
  auto cfg = SmallConfig(1);
  cfg.n_init = 1;
  EXPECT_THROW(TurboOptimizer(cfg, 3), std::invalid_argument);
  cfg = SmallConfig(1);
  cfg.length_min = 0.5;
  EXPECT_THROW(TurboOptimizer(cfg, 3), std::invalid_argument);
  EXPECT_THROW(TurboOptimizer(SmallConfig(1), 0), std::invalid_argument);
}

}  // namespace
}  // namespace kdnas
