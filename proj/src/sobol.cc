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

#include "kdnas/sobol.h"

#include <bit>
#include <stdexcept>
#include <string>

namespace kdnas {
namespace {

struct DirectionInit {
  int degree;
  std::uint32_t polynomial;  // includes the leading and trailing ones
  std::array<std::uint32_t, 18> m;
};

constexpr DirectionInit kDirectionTable[] = {
#include "sobol_directions.inc"
};
static_assert(std::size(kDirectionTable) == kMaxSobolDims);

constexpr double kTwoPowMinus32 = 1.0 / 4294967296.0;

std::array<std::uint32_t, 32> BuildDirections(const DirectionInit& init) {
  std::array<std::uint32_t, 32> v{};
  if (init.degree == 0) {
    for (int j = 0; j < 32; ++j) v[j] = std::uint32_t{1} << (31 - j);
    return v;
  }
  const int s = init.degree;
  // Interior coefficients a_1..a_{s-1} of the primitive polynomial.
  const std::uint32_t a = (init.polynomial >> 1) & ((std::uint32_t{1} << (s - 1)) - 1);
  for (int j = 0; j < s && j < 32; ++j) v[j] = init.m[j] << (31 - j);
  for (int j = s; j < 32; ++j) {
    std::uint32_t x = v[j - s] ^ (v[j - s] >> s);
    for (int k = 1; k < s; ++k) {
      if ((a >> (s - 1 - k)) & 1u) x ^= v[j - k];
    }
    v[j] = x;
  }
  return v;
}

}  // namespace

SobolSequence::SobolSequence(std::size_t dims) : dims_(dims), state_(dims, 0) {
  if (dims == 0 || dims > kMaxSobolDims) {
    throw std::invalid_argument("Sobol dimension must be in 1.." +
                                std::to_string(kMaxSobolDims));
  }
  directions_.reserve(dims);
  for (std::size_t i = 0; i < dims; ++i) {
    directions_.push_back(BuildDirections(kDirectionTable[i]));
  }
}

void SobolSequence::Seek(std::uint64_t index) {
  if (index >= (std::uint64_t{1} << 32)) {
    throw std::out_of_range("Sobol index exceeds 2^32");
  }
  index_ = index;
  const std::uint64_t gray = index ^ (index >> 1);
  for (std::size_t i = 0; i < dims_; ++i) {
    std::uint32_t x = 0;
    for (int bit = 0; bit < 32; ++bit) {
      if ((gray >> bit) & 1u) x ^= directions_[i][bit];
    }
    state_[i] = x;
  }
}

void SobolSequence::Next(double* out) {
  for (std::size_t i = 0; i < dims_; ++i) out[i] = state_[i] * kTwoPowMinus32;
  ++index_;
  const int bit = std::countr_zero(index_);
  if (bit >= 32) throw std::out_of_range("Sobol sequence exhausted");
  for (std::size_t i = 0; i < dims_; ++i) state_[i] ^= directions_[i][bit];
}

std::vector<double> SobolSequence::Next() {
  std::vector<double> out(dims_);
  Next(out.data());
  return out;
}

std::vector<EncodedPoint> SobolPoints(std::size_t d, std::size_t n,
                                      std::uint64_t skip) {
  SobolSequence seq(d);
  seq.Seek(skip);
  std::vector<EncodedPoint> points;
  points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) points.emplace_back(seq.Next());
  return points;
}

}  // namespace kdnas
