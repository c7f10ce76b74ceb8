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

#include "kdnas/synthetic.h"

#include <cmath>
#include <stdexcept>

namespace kdnas {

std::vector<double> SyntheticOptimum(std::size_t d) {
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  std::vector<double> x(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double t = static_cast<double>(i + 1) * golden;
    x[i] = 0.15 + 0.7 * (t - std::floor(t));
  }
  return x;
}

double SyntheticAccuracy(const EncodedPoint& x) {
  const std::size_t d = x.size();
  if (d == 0) throw std::invalid_argument("synthetic oracle needs d >= 1");
  const std::vector<double> opt = SyntheticOptimum(d);
  double sq = 0.0;
  for (std::size_t i = 0; i < d; ++i) sq += (x[i] - opt[i]) * (x[i] - opt[i]);
  return 0.50 + 0.40 * std::exp(-sq / (0.1 * static_cast<double>(d)));
}

}  // namespace kdnas
