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

#ifndef KDNAS_OBJECTIVE_H_
#define KDNAS_OBJECTIVE_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace kdnas {

inline constexpr double kDefaultEpsilon = 0.01;

// Resources of the teacher the student is measured against, and the accuracy
// the student has to reach.
struct TeacherBudget {
  std::int64_t np_teacher = 0;
  std::int64_t flops_teacher = 0;
  double latency_teacher = 0.0;  // seconds
  double acc_target = 0.0;       // in (0, 1]

  // Throws std::invalid_argument unless every field is strictly positive.
  void Validate() const;
};

struct Metrics {
  double acc_student = 0.0;  // top-1 in [0, 1]
  std::int64_t np_student = 0;
  std::int64_t flops_student = 0;
  double latency_student = 0.0;  // seconds

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct ScoreBreakdown {
  double s = 0.0;     // summed student/teacher resource ratios
  int indicator = 0;  // 1 iff the student meets the accuracy target
  double score = 0.0; // lower is better

  friend bool operator==(const ScoreBreakdown&, const ScoreBreakdown&) = default;
};

// score = acc_target / (acc_student * (indicator + epsilon)) * s
// Throws std::domain_error for acc_student == 0 and std::invalid_argument for
// epsilon <= 0 or an invalid budget.
ScoreBreakdown KdScore(const Metrics& m, const TeacherBudget& b,
                       double epsilon = kDefaultEpsilon);

// a >= b in accuracy, a <= b in params, flops and latency, and strictly
// better in at least one of the four.
bool Dominates(const Metrics& a, const Metrics& b);

// Indices of the non-dominated entries, ascending. Entries with identical
// metrics do not dominate each other and are all kept.
std::vector<std::size_t> ParetoFrontIndices(std::span<const Metrics> metrics);

template <typename Record, typename MetricsOf>
std::vector<Record> ParetoFront(std::span<const Record> records,
                                MetricsOf metrics_of) {
  std::vector<Metrics> metrics;
  metrics.reserve(records.size());
  for (const Record& r : records) metrics.push_back(metrics_of(r));
  std::vector<Record> front;
  for (std::size_t i : ParetoFrontIndices(metrics)) front.push_back(records[i]);
  return front;
}

}  // namespace kdnas

#endif  // KDNAS_OBJECTIVE_H_
