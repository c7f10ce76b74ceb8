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

#ifndef KDNAS_TURBO_H_
#define KDNAS_TURBO_H_

// Multi-region trust-region Bayesian optimizer. Each region keeps its own GP
// over its local observations; every step each active region draws one
// Thompson sample over its candidate set and the globally lowest draws form
// the next batch, which is how evaluations get allocated across regions.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "kdnas/gaussian_process.h"
#include "kdnas/trust_region.h"

namespace kdnas {

struct Proposal {
  std::int64_t id = 0;
  int region = 0;
  EncodedPoint point;
  bool design = false;  // Latin hypercube seed rather than a GP proposal
};

// Result of evaluating a proposal; nullopt marks a failed evaluation, which
// is never shown to the surrogate.
struct Outcome {
  std::int64_t id = 0;
  std::optional<double> value;
};

class TurboOptimizer {
 public:
  TurboOptimizer(OptimizerConfig cfg, std::size_t dims);

  // Replaces the Latin hypercube seeds of a region. Only valid before the
  // first Step.
  void SetInitialDesign(int region, std::vector<EncodedPoint> points);

  // Consumes the results of the previously issued batch (all of them, in any
  // order) and issues at most max_points new proposals. The first call takes
  // no results. An empty return means nothing is left to propose.
  std::vector<Proposal> Step(std::span<const Outcome> results,
                             std::size_t max_points);

  const OptimizerConfig& config() const { return cfg_; }
  std::size_t dims() const { return dims_; }
  const std::vector<TrustRegionState>& regions() const { return regions_; }
  const std::vector<Proposal>& pending() const { return pending_; }
  std::optional<Observation> incumbent() const { return best_; }
  std::int64_t steps() const { return steps_; }
  std::int64_t gp_proposals() const { return gp_proposals_; }

  // Everything needed to continue bit-identically: configuration, region
  // states, queued seeds, the in-flight batch and counters.
  nlohmann::json Snapshot() const;
  static TurboOptimizer Restore(const nlohmann::json& snapshot);

 private:
  void QueueDesign(int region);
  void Restart(int region);
  void Activate(int region);
  const GaussianProcess* RegionModel(int region);
  std::vector<Proposal> Issue(std::size_t max_points);

  OptimizerConfig cfg_;
  std::size_t dims_;
  std::vector<TrustRegionState> regions_;
  std::vector<std::deque<EncodedPoint>> design_queue_;
  std::vector<std::optional<GaussianProcess>> models_;  // cache, not persisted
  std::vector<Proposal> pending_;
  std::optional<Observation> best_;
  std::int64_t next_id_ = 0;
  std::int64_t steps_ = 0;
  std::int64_t gp_proposals_ = 0;
};

nlohmann::json ToJson(const OptimizerConfig& cfg);
OptimizerConfig OptimizerConfigFromJson(const nlohmann::json& j);

}  // namespace kdnas

#endif  // KDNAS_TURBO_H_
