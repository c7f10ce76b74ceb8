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

#ifndef KDNAS_GAUSSIAN_PROCESS_H_
#define KDNAS_GAUSSIAN_PROCESS_H_

// Exact GP regression with an ARD Matern-5/2 kernel. Targets are standardized
// internally; every public quantity (means, variances, samples, noise) is
// reported in the caller's units.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "kdnas/search_space.h"

namespace kdnas {

struct Observation {
  EncodedPoint point;
  double value = 0.0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct GpFitOptions {
  double noise_floor = 1e-6;  // standardized units
  bool fit_noise = true;      // false: noise pinned at the floor
  int restarts = 4;
  int iterations = 50;
  double learning_rate = 0.1;
  double lengthscale_min = 0.005;
  double lengthscale_max = 2.0;
  double signal_variance_min = 0.05;
  double signal_variance_max = 20.0;
  double noise_variance_max = 0.2;
  std::uint64_t seed = 0;
};

struct GpHyperparameters {
  Eigen::VectorXd lengthscales;
  double signal_variance = 1.0;
  double noise_variance = 1e-3;  // standardized units
};

// k(a, b) = s * (1 + sqrt(5) r + 5 r^2 / 3) exp(-sqrt(5) r),
// r = || (a - b) / lengthscales ||.
Eigen::MatrixXd Matern52(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         const Eigen::VectorXd& lengthscales,
                         double signal_variance);

class GaussianProcess {
 public:
  struct Posterior {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;  // latent function, excludes noise
  };

  // Maximizes the log marginal likelihood over lengthscales, signal and noise
  // variance with Adam from `restarts` jittered starting points. A singular
  // kernel matrix raises the noise floor tenfold, at most three times.
  // Throws std::invalid_argument for fewer than 2 rows.
  static GaussianProcess Fit(Eigen::MatrixXd x, Eigen::VectorXd y,
                             const GpFitOptions& opts = {});

  // Conditions on the data with fixed hyperparameters.
  static GaussianProcess Condition(Eigen::MatrixXd x, Eigen::VectorXd y,
                                   GpHyperparameters hyper);

  Posterior Predict(const Eigen::MatrixXd& xs) const;

  // One draw from the joint posterior of the latent function at the rows of
  // xs.
  Eigen::VectorXd SampleJoint(const Eigen::MatrixXd& xs,
                              std::mt19937_64& rng) const;

  const GpHyperparameters& hyperparameters() const { return hyper_; }
  double noise_variance() const { return hyper_.noise_variance * y_scale_ * y_scale_; }
  double log_marginal_likelihood() const { return mll_; }
  const Eigen::MatrixXd& inputs() const { return x_; }
  std::size_t size() const { return static_cast<std::size_t>(x_.rows()); }
  std::size_t dims() const { return static_cast<std::size_t>(x_.cols()); }

 private:
  GaussianProcess() = default;
  bool Factorize();

  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;  // standardized
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  GpHyperparameters hyper_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double mll_ = 0.0;
};

// Fits on observations; duplicate inputs are collapsed to their lowest value.
GaussianProcess GpFit(std::span<const Observation> obs,
                      const GpFitOptions& opts = {});

}  // namespace kdnas

#endif  // KDNAS_GAUSSIAN_PROCESS_H_
