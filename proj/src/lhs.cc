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

#include "kdnas/lhs.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace kdnas {

std::vector<EncodedPoint> LatinHypercube(std::size_t n, std::size_t d,
                                         std::uint64_t seed) {
  if (n == 0 || d == 0) throw std::invalid_argument("LHS needs n >= 1 and d >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, 1.0);
  std::vector<std::vector<double>> coords(n, std::vector<double>(d));
  std::vector<std::size_t> strata(n);
  for (std::size_t j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    std::shuffle(strata.begin(), strata.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = (static_cast<double>(strata[i]) + jitter(rng)) /
                       static_cast<double>(n);
      // Guard the upper stratum edge against rounding up to the next one.
      coords[i][j] = std::min(v, std::nextafter(
                                     static_cast<double>(strata[i] + 1) / n, 0.0));
    }
  }
  std::vector<EncodedPoint> points;
  points.reserve(n);
  for (auto& c : coords) points.emplace_back(std::move(c));
  return points;
}

}  // namespace kdnas
