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

#ifndef KDNAS_SOBOL_H_
#define KDNAS_SOBOL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "kdnas/search_space.h"

namespace kdnas {

inline constexpr std::size_t kMaxSobolDims = 256;

// Unscrambled base-2 Sobol sequence in Gray-code order with Joe-Kuo
// direction numbers, 32 bits per coordinate. Point 0 is the origin.
class SobolSequence {
 public:
  // Throws std::invalid_argument when dims is 0 or exceeds kMaxSobolDims.
  explicit SobolSequence(std::size_t dims);

  // Positions the sequence so that the next point returned is `index`.
  void Seek(std::uint64_t index);
  // Writes the current point into `out` (dims() values in [0, 1)) and advances.
  void Next(double* out);
  std::vector<double> Next();

  std::size_t dims() const { return dims_; }
  std::uint64_t index() const { return index_; }

 private:
  std::size_t dims_;
  std::uint64_t index_ = 0;
  std::vector<std::uint32_t> state_;
  std::vector<std::array<std::uint32_t, 32>> directions_;
};

// Points skip, skip+1, ..., skip+n-1 of the d-dimensional sequence. The
// default skip drops the origin.
std::vector<EncodedPoint> SobolPoints(std::size_t d, std::size_t n,
                                      std::uint64_t skip = 1);

}  // namespace kdnas

#endif  // KDNAS_SOBOL_H_
