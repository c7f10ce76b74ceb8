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

#ifndef KDNAS_SYNTHETIC_H_
#define KDNAS_SYNTHETIC_H_

#include <cstddef>
#include <vector>

#include "kdnas/search_space.h"

namespace kdnas {

inline constexpr double kSyntheticPeakAccuracy = 0.90;

// The fixed optimum x* of the synthetic oracle:
// x*_i = 0.15 + 0.7 * frac((i + 1) * (sqrt(5) - 1) / 2), i = 0..d-1.
std::vector<double> SyntheticOptimum(std::size_t d);

// acc(x) = 0.50 + 0.40 * exp(-||x - x*||^2 / (0.1 d)), in (0.5, 0.9].
double SyntheticAccuracy(const EncodedPoint& x);

}  // namespace kdnas

#endif  // KDNAS_SYNTHETIC_H_
