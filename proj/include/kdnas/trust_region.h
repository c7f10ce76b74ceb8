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

#ifndef KDNAS_TRUST_REGION_H_
#define KDNAS_TRUST_REGION_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "kdnas/gaussian_process.h"
#include "kdnas/search_space.h"

namespace kdnas {

struct OptimizerConfig {
  int n_init = 10;  // Latin hypercube seeds per region (and per restart)
  int n_regions = 3;
  int batch_size = 4;
  int candidates_per_proposal = 0;  // 0: min(2000, 100 * d)
  int success_tolerance = 2;
  int failure_tolerance = 2;
  double length_init = 0.4;
  double length_min = 0.1;
  double length_max = 0.8;
  std::uint64_t seed = 0;
  bool log_values = true;  // fit the surrogate on log(score)
  GpFitOptions gp;

  // Throws std::invalid_argument on violated invariants.
  void Validate() const;
  int Candidates(std::size_t dims) const;
};

enum class RegionStatus { kActive, kRestarting };

struct TrustRegionState {
  EncodedPoint center;
  double incumbent = std::numeric_limits<double>::infinity();
  double length = 0.4;
  double length_init = 0.4;
  double length_min = 0.1;
  double length_max = 0.8;
  int success_count = 0;
  int failure_count = 0;
  int success_tolerance = 2;
  int failure_tolerance = 2;
  std::vector<Observation> observations;
  RegionStatus status = RegionStatus::kRestarting;
  int restarts = 0;

  static TrustRegionState Fresh(const OptimizerConfig& cfg);
};

// Success/failure bookkeeping after a batch. `batch_best` is the best usable
// result the region got back (nullopt when every evaluation failed, which
// counts as a failure). A new best moves the center; success_tolerance
// successes in a row double the length (capped at length_max) and
// failure_tolerance failures in a row halve it. Falling below length_min puts
// the region into kRestarting with cleared observations and length_init.
TrustRegionState TrUpdate(TrustRegionState state,
                          const std::optional<Observation>& batch_best);

struct TrustRegionBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

// Hyperrectangle centered on state.center with half-widths
// (L / 2) * l_i / geomean(l), clipped to [0,1]^d. nullopt when every width is
// below 1e-9.
std::optional<TrustRegionBox> TrustRegionBounds(const TrustRegionState& state,
                                                const Eigen::VectorXd& lengthscales);

struct CandidateSet {
  Eigen::MatrixXd points;   // one candidate per row
  Eigen::VectorXd samples;  // one joint posterior draw at the rows
};

// Sobol candidates inside the trust region, each perturbing a random subset of
// the center's coordinates (probability min(1, 20/d), at least one), plus one
// Thompson sample. nullopt for a degenerate region.
std::optional<CandidateSet> SampleCandidates(const TrustRegionState& state,
                                             const GaussianProcess& gp,
                                             const OptimizerConfig& cfg,
                                             std::uint64_t seed);

// The batch_size candidates with the lowest sampled values; nullopt signals
// a restart.
std::optional<std::vector<EncodedPoint>> TrPropose(const TrustRegionState& state,
                                                   const GaussianProcess& gp,
                                                   const OptimizerConfig& cfg,
                                                   std::uint64_t seed);

}  // namespace kdnas

#endif  // KDNAS_TRUST_REGION_H_
