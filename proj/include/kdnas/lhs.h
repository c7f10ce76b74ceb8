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

#ifndef KDNAS_LHS_H_
#define KDNAS_LHS_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kdnas/search_space.h"

namespace kdnas {

// n points in [0,1)^d; in every dimension exactly one point falls in each
// stratum [i/n, (i+1)/n), jittered uniformly inside it.
std::vector<EncodedPoint> LatinHypercube(std::size_t n, std::size_t d,
                                         std::uint64_t seed);

}  // namespace kdnas

#endif  // KDNAS_LHS_H_
