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

#include "kdnas/trust_region.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "kdnas/sobol.h"

namespace kdnas {

void OptimizerConfig::Validate() const {
  if (n_init < 2) throw std::invalid_argument("n_init must be >= 2");
  if (n_regions < 1) throw std::invalid_argument("n_regions must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (candidates_per_proposal < 0) {
    throw std::invalid_argument("candidates_per_proposal must be >= 0");
  }
  if (success_tolerance < 1 || failure_tolerance < 1) {
    throw std::invalid_argument("tolerances must be >= 1");
  }
  if (!(0.0 < length_min && length_min < length_init && length_init <= length_max)) {
    throw std::invalid_argument("need 0 < length_min < length_init <= length_max");
  }
}

int OptimizerConfig::Candidates(std::size_t dims) const {
  if (candidates_per_proposal > 0) return candidates_per_proposal;
  return static_cast<int>(std::min<std::size_t>(2000, 100 * dims));
}

TrustRegionState TrustRegionState::Fresh(const OptimizerConfig& cfg) {
  TrustRegionState s;
  s.length = cfg.length_init;
  s.length_init = cfg.length_init;
  s.length_min = cfg.length_min;
  s.length_max = cfg.length_max;
  s.success_tolerance = cfg.success_tolerance;
  s.failure_tolerance = cfg.failure_tolerance;
  return s;
}

TrustRegionState TrUpdate(TrustRegionState state,
                          const std::optional<Observation>& batch_best) {
  if (state.status != RegionStatus::kActive) {
    throw std::logic_error("TrUpdate on a region that is not active");
  }
  if (batch_best && batch_best->value < state.incumbent) {
    state.center = batch_best->point;
    state.incumbent = batch_best->value;
    ++state.success_count;
    state.failure_count = 0;
    if (state.success_count == state.success_tolerance) {
      state.length = std::min(2.0 * state.length, state.length_max);
      state.success_count = 0;
    }
  } else {
    ++state.failure_count;
    state.success_count = 0;
    if (state.failure_count == state.failure_tolerance) {
      state.length /= 2.0;
      state.failure_count = 0;
    }
  }
  if (state.length < state.length_min) {
    state.status = RegionStatus::kRestarting;
    state.length = state.length_init;
    state.success_count = 0;
    state.failure_count = 0;
    state.incumbent = std::numeric_limits<double>::infinity();
    state.observations.clear();
    ++state.restarts;
  }
  return state;
}

std::optional<TrustRegionBox> TrustRegionBounds(const TrustRegionState& state,
                                                const Eigen::VectorXd& lengthscales) {
  const Eigen::Index d = static_cast<Eigen::Index>(state.center.size());
  if (lengthscales.size() != d) {
    throw std::invalid_argument("lengthscales do not match the region dimension");
  }
  const double geomean = std::exp(lengthscales.array().log().mean());
  const Eigen::VectorXd half = (state.length / 2.0) * lengthscales / geomean;
  const Eigen::VectorXd center =
      Eigen::Map<const Eigen::VectorXd>(state.center.coords().data(), d);
  TrustRegionBox box{(center - half).cwiseMax(0.0), (center + half).cwiseMin(1.0)};
  if (((box.upper - box.lower).array() < 1e-9).all()) return std::nullopt;
  return box;
}

std::optional<CandidateSet> SampleCandidates(const TrustRegionState& state,
                                             const GaussianProcess& gp,
                                             const OptimizerConfig& cfg,
                                             std::uint64_t seed) {
  const std::size_t d = state.center.size();
  const auto box = TrustRegionBounds(state, gp.hyperparameters().lengthscales);
  if (!box) return std::nullopt;

  std::mt19937_64 rng(seed);
  const int m = cfg.Candidates(d);
  SobolSequence sobol(d);
  sobol.Seek(1 + std::uniform_int_distribution<std::uint64_t>(0, (1u << 20) - 1)(rng));

  const double p_perturb = std::min(1.0, 20.0 / static_cast<double>(d));
  std::bernoulli_distribution perturb(p_perturb);
  std::uniform_int_distribution<std::size_t> any_dim(0, d - 1);
  const Eigen::VectorXd width = box->upper - box->lower;

  CandidateSet out;
  out.points.resize(m, static_cast<Eigen::Index>(d));
  std::vector<double> u(d);
  std::vector<char> mask(d);
  for (int i = 0; i < m; ++i) {
    sobol.Next(u.data());
    bool any = false;
    for (std::size_t j = 0; j < d; ++j) {
      mask[j] = perturb(rng);
      any = any || mask[j];
    }
    if (!any) mask[any_dim(rng)] = 1;
    for (std::size_t j = 0; j < d; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      out.points(i, jj) = mask[j] ? box->lower(jj) + width(jj) * u[j] : state.center[j];
    }
  }
  out.samples = gp.SampleJoint(out.points, rng);
  return out;
}

std::optional<std::vector<EncodedPoint>> TrPropose(const TrustRegionState& state,
                                                   const GaussianProcess& gp,
                                                   const OptimizerConfig& cfg,
                                                   std::uint64_t seed) {
  if (state.status != RegionStatus::kActive) {
    throw std::logic_error("TrPropose on a region that is not active");
  }
  const auto cands = SampleCandidates(state, gp, cfg, seed);
  if (!cands) return std::nullopt;
  std::vector<Eigen::Index> order(cands->samples.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto k = std::min<std::size_t>(cfg.batch_size, order.size());
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      return cands->samples(a) < cands->samples(b) ||
                             (cands->samples(a) == cands->samples(b) && a < b);
                    });
  std::vector<EncodedPoint> out;
  for (std::size_t i = 0; i < k; ++i) {
    const Eigen::VectorXd row = cands->points.row(order[i]).transpose();
    out.emplace_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  return out;
}

}  // namespace kdnas
