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

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "kdnas/lhs.h"
#include "kdnas/sobol.h"

namespace kdnas {
namespace {

// Reference values of the unscrambled Joe-Kuo sequence (new-joe-kuo-6.21201),
// indices 1..8, as produced by an independent reference implementation.
struct Column {
  std::size_t dim;
  double values[8];
};
constexpr Column kReference[] = {
    {0, {0.5, 0.75, 0.25, 0.375, 0.875, 0.625, 0.125, 0.1875}},
    {1, {0.5, 0.25, 0.75, 0.375, 0.875, 0.125, 0.625, 0.3125}},
    {2, {0.5, 0.25, 0.75, 0.625, 0.125, 0.875, 0.375, 0.9375}},
    {10, {0.5, 0.75, 0.25, 0.875, 0.375, 0.125, 0.625, 0.6875}},
    {52, {0.5, 0.75, 0.25, 0.125, 0.625, 0.875, 0.375, 0.1875}},
};

TEST(SobolTest, OneDimensionalFirstPoints) {
  const auto pts = SobolPoints(1, 3);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0][0], 0.5);
  EXPECT_EQ(pts[1][0], 0.75);
  EXPECT_EQ(pts[2][0], 0.25);
}

TEST(SobolTest, MatchesReferenceColumns) {
  const auto pts = SobolPoints(53, 8);
  for (const Column& c : kReference) {
    for (int i = 0; i < 8; ++i) EXPECT_EQ(pts[i][c.dim], c.values[i]) << c.dim << " " << i;
  }
}

TEST(SobolTest, MatchesReferenceInHighDimensions) {
  SobolSequence seq(256);
  seq.Seek(1000);
  EXPECT_EQ(seq.Next()[255], 0.2490234375);
  seq.Seek(777);
  EXPECT_EQ(seq.Next()[200], 0.9912109375);
}

TEST(SobolTest, SeekAgreesWithSequentialGeneration) {
  SobolSequence a(53), b(53);
  for (int i = 0; i < 300; ++i) a.Next();
  b.Seek(300);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(a.Next(), b.Next());
}

TEST(SobolTest, FirstPointIsOriginAndRangeIsHalfOpen) {
  SobolSequence seq(20);
  const auto origin = seq.Next();
  EXPECT_TRUE(std::all_of(origin.begin(), origin.end(), [](double v) { return v == 0.0; }));
  for (const auto& p : SobolPoints(256, 1000)) {
    for (double v : p.coords()) {
      ASSERT_GE(v, 0.0);
      ASSERT_LT(v, 1.0);
    }
  }
}

TEST(SobolTest, TwoDimensionalNetProperty) {
  // Points 0..15 (including the origin) hit every k/16 exactly once per axis.
  const auto pts = SobolPoints(2, 16, 0);
  for (std::size_t dim = 0; dim < 2; ++dim) {
    std::set<int> seen;
    for (const auto& p : pts) {
      const double scaled = p[dim] * 16.0;
      EXPECT_EQ(scaled, std::floor(scaled));
      seen.insert(static_cast<int>(scaled));
    }
    EXPECT_EQ(seen.size(), 16u);
  }
}

TEST(SobolTest, EveryDimensionIsStratifiedOverPowerOfTwoBlocks) {
  const auto pts = SobolPoints(256, 64, 0);
  for (std::size_t dim = 0; dim < 256; ++dim) {
    std::set<int> bins;
    for (const auto& p : pts) bins.insert(static_cast<int>(p[dim] * 64));
    EXPECT_EQ(bins.size(), 64u) << dim;
  }
}

TEST(SobolTest, RejectsBadDimensions) {
  EXPECT_THROW(SobolSequence(0), std::invalid_argument);
  EXPECT_THROW(SobolSequence(kMaxSobolDims + 1), std::invalid_argument);
}

void ExpectStratified(const std::vector<EncodedPoint>& pts, std::size_t n, std::size_t d) {
  ASSERT_EQ(pts.size(), n);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<int> count(n, 0);
    for (const auto& p : pts) {
      ASSERT_EQ(p.size(), d);
      const auto bin = static_cast<std::size_t>(std::floor(p[j] * static_cast<double>(n)));
      ASSERT_LT(bin, n);
      ++count[bin];
    }
    for (std::size_t b = 0; b < n; ++b) EXPECT_EQ(count[b], 1) << "dim " << j << " bin " << b;
  }
}

TEST(LatinHypercubeTest, FourByTwo) { ExpectStratified(LatinHypercube(4, 2, 1), 4, 2); }

TEST(LatinHypercubeTest, FiftyByFiftyThree) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ExpectStratified(LatinHypercube(50, 53, seed), 50, 53);
  }
}

TEST(LatinHypercubeTest, SinglePoint) {
  const auto pts = LatinHypercube(1, 7, 3);
  ASSERT_EQ(pts.size(), 1u);
  for (double v : pts[0].coords()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(LatinHypercubeTest, DeterministicPerSeed) {
  EXPECT_EQ(LatinHypercube(10, 5, 8), LatinHypercube(10, 5, 8));
  EXPECT_NE(LatinHypercube(10, 5, 8), LatinHypercube(10, 5, 9));
  EXPECT_THROW(LatinHypercube(0, 5, 1), std::invalid_argument);
}

}  // namespace
}  // namespace kdnas
