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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

#include "kdnas/lhs.h"
#include "kdnas/random.h"

namespace kdnas {
namespace {

enum Stream : std::uint64_t { kLhsStream = 1, kGpStream = 2, kThompsonStream = 3 };

nlohmann::json PointJson(const EncodedPoint& p) {
  return nlohmann::json(std::vector<double>(p.coords().begin(), p.coords().end()));
}

EncodedPoint PointFromJson(const nlohmann::json& j) {
  return EncodedPoint(j.get<std::vector<double>>());
}

double Transformed(const OptimizerConfig& cfg, double value) {
  return cfg.log_values ? std::log(std::max(value, 1e-300)) : value;
}

}  // namespace

nlohmann::json ToJson(const OptimizerConfig& cfg) {
  return {{"n_init", cfg.n_init},
          {"n_regions", cfg.n_regions},
          {"batch_size", cfg.batch_size},
          {"candidates_per_proposal", cfg.candidates_per_proposal},
          {"success_tolerance", cfg.success_tolerance},
          {"failure_tolerance", cfg.failure_tolerance},
          {"length_init", cfg.length_init},
          {"length_min", cfg.length_min},
          {"length_max", cfg.length_max},
          {"seed", cfg.seed},
          {"log_values", cfg.log_values},
          {"gp",
           {{"noise_floor", cfg.gp.noise_floor},
            {"fit_noise", cfg.gp.fit_noise},
            {"restarts", cfg.gp.restarts},
            {"iterations", cfg.gp.iterations},
            {"learning_rate", cfg.gp.learning_rate},
            {"lengthscale_min", cfg.gp.lengthscale_min},
            {"lengthscale_max", cfg.gp.lengthscale_max},
            {"signal_variance_min", cfg.gp.signal_variance_min},
            {"signal_variance_max", cfg.gp.signal_variance_max},
            {"noise_variance_max", cfg.gp.noise_variance_max}}}};
}

OptimizerConfig OptimizerConfigFromJson(const nlohmann::json& j) {
  OptimizerConfig c;
  c.n_init = j.at("n_init").get<int>();
  c.n_regions = j.at("n_regions").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.candidates_per_proposal = j.at("candidates_per_proposal").get<int>();
  c.success_tolerance = j.at("success_tolerance").get<int>();
  c.failure_tolerance = j.at("failure_tolerance").get<int>();
  c.length_init = j.at("length_init").get<double>();
  c.length_min = j.at("length_min").get<double>();
  c.length_max = j.at("length_max").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.log_values = j.at("log_values").get<bool>();
  const auto& gp = j.at("gp");
  c.gp.noise_floor = gp.at("noise_floor").get<double>();
  c.gp.fit_noise = gp.at("fit_noise").get<bool>();
  c.gp.restarts = gp.at("restarts").get<int>();
  c.gp.iterations = gp.at("iterations").get<int>();
  c.gp.learning_rate = gp.at("learning_rate").get<double>();
  c.gp.lengthscale_min = gp.at("lengthscale_min").get<double>();
  c.gp.lengthscale_max = gp.at("lengthscale_max").get<double>();
  c.gp.signal_variance_min = gp.at("signal_variance_min").get<double>();
  c.gp.signal_variance_max = gp.at("signal_variance_max").get<double>();
  c.gp.noise_variance_max = gp.at("noise_variance_max").get<double>();
  return c;
}

TurboOptimizer::TurboOptimizer(OptimizerConfig cfg, std::size_t dims)
    : cfg_(std::move(cfg)), dims_(dims) {
  cfg_.Validate();
  if (dims_ == 0) throw std::invalid_argument("optimizer needs d >= 1");
  regions_.assign(cfg_.n_regions, TrustRegionState::Fresh(cfg_));
  design_queue_.resize(cfg_.n_regions);
  models_.resize(cfg_.n_regions);
  for (int r = 0; r < cfg_.n_regions; ++r) QueueDesign(r);
}

void TurboOptimizer::QueueDesign(int region) {
  const auto seed = DeriveSeed(cfg_.seed, {kLhsStream, static_cast<std::uint64_t>(region),
                                           static_cast<std::uint64_t>(regions_[region].restarts)});
  const auto points = LatinHypercube(cfg_.n_init, dims_, seed);
  design_queue_[region].assign(points.begin(), points.end());
  models_[region].reset();
}

void TurboOptimizer::Restart(int region) {
  const int restarts = regions_[region].restarts + 1;
  regions_[region] = TrustRegionState::Fresh(cfg_);
  regions_[region].restarts = restarts;
  QueueDesign(region);
}

void TurboOptimizer::SetInitialDesign(int region, std::vector<EncodedPoint> points) {
  if (steps_ != 0 || !pending_.empty()) {
    throw std::logic_error("initial designs must be set before the first step");
  }
  if (region < 0 || region >= cfg_.n_regions) throw std::out_of_range("region id");
  for (const auto& p : points) {
    if (p.size() != dims_) throw std::invalid_argument("design point dimension mismatch");
  }
  design_queue_[region].assign(points.begin(), points.end());
}

void TurboOptimizer::Activate(int region) {
  TrustRegionState& s = regions_[region];
  const auto best = std::min_element(
      s.observations.begin(), s.observations.end(),
      [](const Observation& a, const Observation& b) { return a.value < b.value; });
  s.center = best->point;
  s.incumbent = best->value;
  s.length = s.length_init;
  s.success_count = 0;
  s.failure_count = 0;
  s.status = RegionStatus::kActive;
}

const GaussianProcess* TurboOptimizer::RegionModel(int region) {
  if (models_[region]) return &*models_[region];
  const TrustRegionState& s = regions_[region];
  std::vector<Observation> data;
  data.reserve(s.observations.size());
  for (const Observation& o : s.observations) {
    data.push_back({o.point, Transformed(cfg_, o.value)});
  }
  GpFitOptions opts = cfg_.gp;
  // Keyed on the data the model sees, so a restored optimizer refits the
  // same model.
  opts.seed = DeriveSeed(cfg_.seed, {kGpStream, static_cast<std::uint64_t>(region),
                                     static_cast<std::uint64_t>(s.restarts),
                                     s.observations.size()});
  try {
    models_[region] = GpFit(data, opts);
  } catch (const std::exception&) {
    return nullptr;
  }
  return &*models_[region];
}

std::vector<Proposal> TurboOptimizer::Step(std::span<const Outcome> results,
                                           std::size_t max_points) {
  std::map<std::int64_t, const Proposal*> issued;
  for (const Proposal& p : pending_) issued.emplace(p.id, &p);
  std::map<std::int64_t, std::optional<double>> by_id;
  for (const Outcome& o : results) {
    if (!issued.contains(o.id)) {
      throw std::invalid_argument("result for unknown point id " + std::to_string(o.id));
    }
    if (!by_id.emplace(o.id, o.value).second) {
      throw std::invalid_argument("duplicate result for point id " + std::to_string(o.id));
    }
    if (o.value && !std::isfinite(*o.value)) {
      throw std::invalid_argument("non-finite value for point id " + std::to_string(o.id));
    }
  }
  if (by_id.size() != issued.size()) {
    throw std::invalid_argument("step needs results for the whole pending batch");
  }

  std::vector<std::optional<Observation>> batch_best(cfg_.n_regions);
  std::vector<bool> proposed(cfg_.n_regions, false);
  for (const auto& [id, value] : by_id) {
    const Proposal& p = *issued.at(id);
    if (!p.design) proposed[p.region] = true;
    if (!value) continue;
    const Observation obs{p.point, *value};
    regions_[p.region].observations.push_back(obs);
    models_[p.region].reset();
    if (!best_ || obs.value < best_->value) best_ = obs;
    if (!p.design && (!batch_best[p.region] || obs.value < batch_best[p.region]->value)) {
      batch_best[p.region] = obs;
    }
  }
  pending_.clear();

  for (int r = 0; r < cfg_.n_regions; ++r) {
    TrustRegionState& s = regions_[r];
    if (s.status == RegionStatus::kActive && proposed[r]) {
      s = TrUpdate(std::move(s), batch_best[r]);
      if (s.status == RegionStatus::kRestarting) QueueDesign(r);
    } else if (s.status == RegionStatus::kRestarting && design_queue_[r].empty()) {
      if (s.observations.size() >= 2) {
        Activate(r);
      } else {
        Restart(r);
      }
    }
  }
  if (!by_id.empty()) ++steps_;
  return Issue(max_points);
}

std::vector<Proposal> TurboOptimizer::Issue(std::size_t max_points) {
  std::size_t queued = 0;
  for (const auto& q : design_queue_) queued += q.size();

  // (sampled value, region, row) for every active region's candidates.
  std::vector<std::tuple<double, int, Eigen::Index>> pool;
  std::vector<std::optional<CandidateSet>> cands(cfg_.n_regions);
  if (max_points > queued) {
    for (int r = 0; r < cfg_.n_regions; ++r) {
      if (regions_[r].status != RegionStatus::kActive) continue;
      const GaussianProcess* gp = RegionModel(r);
      if (gp != nullptr) {
        cands[r] = SampleCandidates(
            regions_[r], *gp, cfg_,
            DeriveSeed(cfg_.seed, {kThompsonStream, static_cast<std::uint64_t>(steps_),
                                   static_cast<std::uint64_t>(r)}));
      }
      if (!cands[r]) {
        // Degenerate box or unusable surrogate: start this region over.
        Restart(r);
        continue;
      }
      for (Eigen::Index i = 0; i < cands[r]->samples.size(); ++i) {
        pool.emplace_back(cands[r]->samples(i), r, i);
      }
    }
  }

  std::vector<Proposal> batch;
  for (int r = 0; r < cfg_.n_regions; ++r) {
    auto& q = design_queue_[r];
    while (!q.empty() && batch.size() < max_points) {
      batch.push_back({next_id_++, r, std::move(q.front()), true});
      q.pop_front();
    }
  }

  const std::size_t room =
      std::min<std::size_t>(cfg_.batch_size, max_points - std::min(max_points, batch.size()));
  const std::size_t take = std::min(room, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + take, pool.end());
  for (std::size_t k = 0; k < take; ++k) {
    const auto& [value, r, row] = pool[k];
    const Eigen::VectorXd x = cands[r]->points.row(row).transpose();
    batch.push_back({next_id_++, r, EncodedPoint(std::vector<double>(x.data(), x.data() + x.size())),
                     false});
    ++gp_proposals_;
  }
  pending_ = batch;
  return batch;
}

nlohmann::json TurboOptimizer::Snapshot() const {
  nlohmann::json regions = nlohmann::json::array();
  for (int r = 0; r < cfg_.n_regions; ++r) {
    const TrustRegionState& s = regions_[r];
    nlohmann::json obs = nlohmann::json::array();
    for (const Observation& o : s.observations) {
      obs.push_back({{"point", PointJson(o.point)}, {"value", o.value}});
    }
    nlohmann::json queue = nlohmann::json::array();
    for (const EncodedPoint& p : design_queue_[r]) queue.push_back(PointJson(p));
    regions.push_back(
        {{"status", s.status == RegionStatus::kActive ? "active" : "restarting"},
         {"center", PointJson(s.center)},
         {"incumbent", std::isfinite(s.incumbent) ? nlohmann::json(s.incumbent)
                                                  : nlohmann::json(nullptr)},
         {"length", s.length},
         {"success_count", s.success_count},
         {"failure_count", s.failure_count},
         {"restarts", s.restarts},
         {"observations", std::move(obs)},
         {"design_queue", std::move(queue)}});
  }
  nlohmann::json pending = nlohmann::json::array();
  for (const Proposal& p : pending_) {
    pending.push_back({{"id", p.id},
                       {"region", p.region},
                       {"point", PointJson(p.point)},
                       {"design", p.design}});
  }
  nlohmann::json best = nullptr;
  if (best_) best = {{"point", PointJson(best_->point)}, {"value", best_->value}};
  return {{"version", 1},
          {"dims", dims_},
          {"config", ToJson(cfg_)},
          {"regions", std::move(regions)},
          {"pending", std::move(pending)},
          {"best", std::move(best)},
          {"next_id", next_id_},
          {"steps", steps_},
          {"gp_proposals", gp_proposals_}};
}

TurboOptimizer TurboOptimizer::Restore(const nlohmann::json& snapshot) {
  if (snapshot.at("version").get<int>() != 1) {
    throw std::invalid_argument("unsupported optimizer snapshot version");
  }
  TurboOptimizer opt(OptimizerConfigFromJson(snapshot.at("config")),
                     snapshot.at("dims").get<std::size_t>());
  const auto& regions = snapshot.at("regions");
  if (regions.size() != static_cast<std::size_t>(opt.cfg_.n_regions)) {
    throw std::invalid_argument("snapshot region count does not match its config");
  }
  for (int r = 0; r < opt.cfg_.n_regions; ++r) {
    const auto& j = regions[r];
    TrustRegionState& s = opt.regions_[r];
    s.status = j.at("status") == "active" ? RegionStatus::kActive : RegionStatus::kRestarting;
    s.center = PointFromJson(j.at("center"));
    s.incumbent = j.at("incumbent").is_null() ? std::numeric_limits<double>::infinity()
                                              : j.at("incumbent").get<double>();
    s.length = j.at("length").get<double>();
    s.success_count = j.at("success_count").get<int>();
    s.failure_count = j.at("failure_count").get<int>();
    s.restarts = j.at("restarts").get<int>();
    s.observations.clear();
    for (const auto& o : j.at("observations")) {
      s.observations.push_back({PointFromJson(o.at("point")), o.at("value").get<double>()});
    }
    opt.design_queue_[r].clear();
    for (const auto& p : j.at("design_queue")) opt.design_queue_[r].push_back(PointFromJson(p));
    opt.models_[r].reset();
  }
  for (const auto& p : snapshot.at("pending")) {
    opt.pending_.push_back({p.at("id").get<std::int64_t>(), p.at("region").get<int>(),
                            PointFromJson(p.at("point")), p.at("design").get<bool>()});
  }
  if (!snapshot.at("best").is_null()) {
    const auto& b = snapshot.at("best");
    opt.best_ = Observation{PointFromJson(b.at("point")), b.at("value").get<double>()};
  }
  opt.next_id_ = snapshot.at("next_id").get<std::int64_t>();
  opt.steps_ = snapshot.at("steps").get<std::int64_t>();
  opt.gp_proposals_ = snapshot.at("gp_proposals").get<std::int64_t>();
  return opt;
}

}  // namespace kdnas
