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

#include "kdnas/gaussian_process.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace kdnas {
namespace {

const double kSqrt5 = std::sqrt(5.0);

struct Bounds {
  Eigen::VectorXd lo, hi;
};

// Squared scaled distances between the rows of za and zb.
Eigen::MatrixXd SquaredDistances(const Eigen::MatrixXd& za,
                                 const Eigen::MatrixXd& zb) {
  Eigen::MatrixXd d2 = -2.0 * za * zb.transpose();
  d2.colwise() += za.rowwise().squaredNorm();
  d2.rowwise() += zb.rowwise().squaredNorm().transpose();
  return d2.cwiseMax(0.0);
}

struct MllResult {
  bool ok = false;
  double value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd grad;
};

// theta = [log lengthscales..., log signal variance, log noise variance].
MllResult EvaluateMll(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& theta) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::VectorXd inv_ls = (-theta.head(d)).array().exp();
  const double sf2 = std::exp(theta(d));
  const double sn2 = std::exp(theta(d + 1));

  const Eigen::MatrixXd z = x * inv_ls.asDiagonal();
  const Eigen::ArrayXXd r = SquaredDistances(z, z).array().sqrt() * kSqrt5;
  const Eigen::ArrayXXd e = (-r).exp();
  const Eigen::MatrixXd kf = (sf2 * (1.0 + r + r.square() / 3.0) * e).matrix();
  Eigen::MatrixXd k = kf;
  k.diagonal().array() += sn2;

  Eigen::LLT<Eigen::MatrixXd> llt(k);
  MllResult out;
  if (llt.info() != Eigen::Success) return out;
  const Eigen::VectorXd alpha = llt.solve(y);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  out.value = -0.5 * y.dot(alpha) - 0.5 * log_det -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (!std::isfinite(out.value)) return out;
  out.ok = true;

  // d mll / d theta = 0.5 tr((alpha alpha^T - K^-1) dK/dtheta).
  Eigen::MatrixXd w = alpha * alpha.transpose();
  w -= llt.solve(Eigen::MatrixXd::Identity(n, n));
  // dk/dlog l_i = sf2 * 5/3 * (1 + r) e^{-r} * (dz_i)^2 with r = sqrt(5) dist.
  const Eigen::MatrixXd c = (sf2 * (5.0 / 3.0) * (1.0 + r) * e).matrix();
  const Eigen::MatrixXd m = w.cwiseProduct(c);
  const Eigen::VectorXd row_sums = m.rowwise().sum();
  out.grad.resize(d + 2);
  out.grad.head(d) = z.array().square().matrix().transpose() * row_sums -
                     (z.array() * (m * z).array()).colwise().sum().matrix().transpose();
  out.grad(d) = 0.5 * w.cwiseProduct(kf).sum();
  out.grad(d + 1) = 0.5 * sn2 * w.trace();
  return out;
}

Eigen::VectorXd Clamp(const Eigen::VectorXd& theta, const Bounds& b) {
  return theta.cwiseMax(b.lo).cwiseMin(b.hi);
}

// Adam ascent from `start`; returns the best point visited.
std::pair<Eigen::VectorXd, double> Ascend(const Eigen::MatrixXd& x,
                                          const Eigen::VectorXd& y,
                                          Eigen::VectorXd theta, const Bounds& b,
                                          const GpFitOptions& opts) {
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  theta = Clamp(theta, b);
  Eigen::VectorXd best = theta;
  double best_value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd previous = theta;
  double lr = opts.learning_rate;
  for (int t = 1; t <= opts.iterations + 1; ++t) {
    const MllResult r = EvaluateMll(x, y, theta);
    if (!r.ok) {
      theta = previous;
      lr *= 0.5;
      continue;
    }
    if (r.value > best_value) {
      best_value = r.value;
      best = theta;
    }
    if (t > opts.iterations) break;
    Eigen::VectorXd g = r.grad;
    if (!opts.fit_noise) g(g.size() - 1) = 0.0;
    m1 = kBeta1 * m1 + (1.0 - kBeta1) * g;
    m2 = kBeta2 * m2 + (1.0 - kBeta2) * g.cwiseAbs2();
    const Eigen::VectorXd m1_hat = m1 / (1.0 - std::pow(kBeta1, t));
    const Eigen::VectorXd m2_hat = m2 / (1.0 - std::pow(kBeta2, t));
    previous = theta;
    theta = Clamp(theta + lr * (m1_hat.array() / (m2_hat.array().sqrt() + kEps)).matrix(), b);
  }
  return {best, best_value};
}

GpHyperparameters FromTheta(const Eigen::VectorXd& theta, Eigen::Index d) {
  GpHyperparameters h;
  h.lengthscales = theta.head(d).array().exp();
  h.signal_variance = std::exp(theta(d));
  h.noise_variance = std::exp(theta(d + 1));
  return h;
}

}  // namespace

Eigen::MatrixXd Matern52(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         const Eigen::VectorXd& lengthscales,
                         double signal_variance) {
  const Eigen::VectorXd inv_ls = lengthscales.cwiseInverse();
  const Eigen::ArrayXXd r =
      SquaredDistances(a * inv_ls.asDiagonal(), b * inv_ls.asDiagonal()).array().sqrt() *
      kSqrt5;
  return (signal_variance * (1.0 + r + r.square() / 3.0) * (-r).exp()).matrix();
}

bool GaussianProcess::Factorize() {
  Eigen::MatrixXd k = Matern52(x_, x_, hyper_.lengthscales, hyper_.signal_variance);
  k.diagonal().array() += hyper_.noise_variance;
  llt_.compute(k);
  if (llt_.info() != Eigen::Success) return false;
  alpha_ = llt_.solve(y_);
  const double log_det = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
  mll_ = -0.5 * y_.dot(alpha_) - 0.5 * log_det -
         0.5 * static_cast<double>(y_.size()) * std::log(2.0 * std::numbers::pi);
  return std::isfinite(mll_);
}

GaussianProcess GaussianProcess::Condition(Eigen::MatrixXd x, Eigen::VectorXd y,
                                           GpHyperparameters hyper) {
  if (x.rows() < 1 || x.rows() != y.size()) {
    throw std::invalid_argument("GP needs matching, non-empty inputs and targets");
  }
  GaussianProcess gp;
  gp.y_mean_ = y.mean();
  const double var = (y.array() - gp.y_mean_).square().mean();
  gp.y_scale_ = std::max(std::sqrt(var), 1e-8);
  gp.y_ = (y.array() - gp.y_mean_) / gp.y_scale_;
  gp.x_ = std::move(x);
  gp.hyper_ = std::move(hyper);
  if (!gp.Factorize()) throw std::runtime_error("singular kernel matrix");
  return gp;
}

GaussianProcess GaussianProcess::Fit(Eigen::MatrixXd x, Eigen::VectorXd y,
                                     const GpFitOptions& opts) {
  if (x.rows() < 2) throw std::invalid_argument("GP fit needs at least 2 observations");
  if (x.rows() != y.size()) throw std::invalid_argument("GP inputs/targets mismatch");
  if (!y.allFinite() || !x.allFinite()) throw std::invalid_argument("GP data must be finite");

  const Eigen::Index d = x.cols();
  const double mean = y.mean();
  const double scale =
      std::max(std::sqrt((y.array() - mean).square().mean()), 1e-8);
  const Eigen::VectorXd ys = (y.array() - mean) / scale;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> jitter(0.0, 0.5);
  double floor = opts.noise_floor;
  for (int attempt = 0; attempt <= 3; ++attempt, floor *= 10.0) {
    Bounds b;
    b.lo.resize(d + 2);
    b.hi.resize(d + 2);
    b.lo.head(d).setConstant(std::log(opts.lengthscale_min));
    b.hi.head(d).setConstant(std::log(opts.lengthscale_max));
    b.lo(d) = std::log(opts.signal_variance_min);
    b.hi(d) = std::log(opts.signal_variance_max);
    b.lo(d + 1) = std::log(floor);
    b.hi(d + 1) = opts.fit_noise ? std::log(std::max(floor, opts.noise_variance_max))
                                 : std::log(floor);

    Eigen::VectorXd defaults(d + 2);
    defaults.head(d).setConstant(std::log(0.5));
    defaults(d) = 0.0;
    defaults(d + 1) = std::log(opts.fit_noise ? std::max(floor, 5e-3) : floor);

    Eigen::VectorXd best_theta = Clamp(defaults, b);
    double best_value = -std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
      Eigen::VectorXd start = defaults;
      if (restart > 0) {
        for (Eigen::Index i = 0; i < start.size(); ++i) start(i) += jitter(rng);
      }
      auto [theta, value] = Ascend(x, ys, start, b, opts);
      if (value > best_value) {
        best_value = value;
        best_theta = theta;
      }
    }

    GaussianProcess gp;
    gp.x_ = x;
    gp.y_ = ys;
    gp.y_mean_ = mean;
    gp.y_scale_ = scale;
    gp.hyper_ = FromTheta(best_theta, d);
    if (gp.Factorize()) return gp;
  }
  throw std::runtime_error("singular kernel matrix after raising the noise floor");
}

GaussianProcess::Posterior GaussianProcess::Predict(const Eigen::MatrixXd& xs) const {
  const Eigen::MatrixXd ks =
      Matern52(xs, x_, hyper_.lengthscales, hyper_.signal_variance);
  const Eigen::MatrixXd v = llt_.matrixL().solve(ks.transpose());
  Posterior p;
  p.mean = (ks * alpha_).array() * y_scale_ + y_mean_;
  p.variance = ((hyper_.signal_variance - v.colwise().squaredNorm().array())
                    .cwiseMax(0.0) * (y_scale_ * y_scale_))
                   .matrix()
                   .transpose();
  return p;
}

Eigen::VectorXd GaussianProcess::SampleJoint(const Eigen::MatrixXd& xs,
                                             std::mt19937_64& rng) const {
  const Eigen::Index m = xs.rows();
  const Eigen::MatrixXd ks =
      Matern52(xs, x_, hyper_.lengthscales, hyper_.signal_variance);
  const Eigen::VectorXd mean = ks * alpha_;
  const Eigen::MatrixXd v = llt_.matrixL().solve(ks.transpose());

  // Posterior covariance, lower triangle only, built in a single buffer: the
  // candidate sets are large and this dominates the cost of a proposal.
  const Eigen::MatrixXd z = xs * hyper_.lengthscales.cwiseInverse().asDiagonal();
  const Eigen::ArrayXd sq = z.rowwise().squaredNorm().array();
  Eigen::MatrixXd cov(m, m);
  auto build = [&](double jitter) {
    cov.triangularView<Eigen::Lower>().setZero();
    cov.selfadjointView<Eigen::Lower>().rankUpdate(z, -2.0);
    for (Eigen::Index j = 0; j < m; ++j) {
      auto col = cov.col(j).tail(m - j).array();
      const Eigen::ArrayXd r = (5.0 * (col + sq.tail(m - j) + sq(j)).max(0.0)).sqrt();
      col = hyper_.signal_variance * (1.0 + r + r.square() / 3.0) * (-r).exp();
    }
    cov.selfadjointView<Eigen::Lower>().rankUpdate(v.transpose(), -1.0);
    cov.diagonal().array() += jitter;
  };

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z_std(m);
  for (Eigen::Index i = 0; i < m; ++i) z_std(i) = normal(rng);

  double jitter = 1e-10 * hyper_.signal_variance;
  for (int attempt = 0; attempt < 8; ++attempt, jitter *= 10.0) {
    build(jitter);
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> chol(cov);  // in place, lower triangle
    if (chol.info() != Eigen::Success) continue;
    const Eigen::VectorXd f = mean + chol.matrixL() * z_std;
    return (f.array() * y_scale_ + y_mean_).matrix();
  }
  throw std::runtime_error("posterior covariance is not positive definite");
}

GaussianProcess GpFit(std::span<const Observation> obs, const GpFitOptions& opts) {
  std::map<std::vector<double>, double> unique;
  for (const Observation& o : obs) {
    if (!std::isfinite(o.value)) throw std::invalid_argument("observation value must be finite");
    std::vector<double> key(o.point.coords().begin(), o.point.coords().end());
    auto [it, inserted] = unique.emplace(std::move(key), o.value);
    if (!inserted) it->second = std::min(it->second, o.value);
  }
  if (unique.size() < 2) {
    throw std::invalid_argument("GP fit needs at least 2 distinct observations");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(unique.size());
  const Eigen::Index d = static_cast<Eigen::Index>(unique.begin()->first.size());
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  Eigen::Index i = 0;
  for (const auto& [point, value] : unique) {
    if (static_cast<Eigen::Index>(point.size()) != d) {
      throw std::invalid_argument("observations have mixed dimensionality");
    }
    x.row(i) = Eigen::Map<const Eigen::RowVectorXd>(point.data(), d);
    y(i) = value;
    ++i;
  }
  return GaussianProcess::Fit(std::move(x), std::move(y), opts);
}

}  // namespace kdnas
