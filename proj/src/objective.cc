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

#include "kdnas/objective.h"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace kdnas {

void TeacherBudget::Validate() const {
  if (np_teacher <= 0 || flops_teacher <= 0 || !(latency_teacher > 0.0) ||
      !(acc_target > 0.0) || acc_target > 1.0) {
    throw std::invalid_argument(
        "teacher budget needs positive params, flops, latency and a target "
        "accuracy in (0, 1]");
  }
}

ScoreBreakdown KdScore(const Metrics& m, const TeacherBudget& b,
                       double epsilon) {
  b.Validate();
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(m.acc_student >= 0.0 && m.acc_student <= 1.0)) {
    throw std::invalid_argument("student accuracy must be in [0, 1]");
  }
  if (m.acc_student == 0.0) {
    throw std::domain_error("score is undefined for zero student accuracy");
  }
  ScoreBreakdown out;
  out.s = static_cast<double>(m.np_student) / static_cast<double>(b.np_teacher) +
          static_cast<double>(m.flops_student) / static_cast<double>(b.flops_teacher) +
          m.latency_student / b.latency_teacher;
  out.indicator = b.acc_target <= m.acc_student ? 1 : 0;
  out.score = b.acc_target / (m.acc_student * (out.indicator + epsilon)) * out.s;
  return out;
}

bool Dominates(const Metrics& a, const Metrics& b) {
  const bool no_worse = a.acc_student >= b.acc_student &&
                        a.np_student <= b.np_student &&
                        a.flops_student <= b.flops_student &&
                        a.latency_student <= b.latency_student;
  const bool better = a.acc_student > b.acc_student ||
                      a.np_student < b.np_student ||
                      a.flops_student < b.flops_student ||
                      a.latency_student < b.latency_student;
  return no_worse && better;
}

std::vector<std::size_t> ParetoFrontIndices(std::span<const Metrics> metrics) {
  // After a lexicographic sort (accuracy descending, resources ascending) any
  // dominator precedes what it dominates, and whatever dominates a discarded
  // entry is itself dominated by a kept one, so comparing against the kept set
  // is enough.
  std::vector<std::size_t> order(metrics.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t i) {
    const Metrics& m = metrics[i];
    return std::make_tuple(-m.acc_student, m.np_student, m.flops_student,
                           m.latency_student);
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  std::vector<std::size_t> front;
  for (std::size_t i : order) {
    const bool dominated = std::any_of(front.begin(), front.end(), [&](std::size_t f) {
      return Dominates(metrics[f], metrics[i]);
    });
    if (!dominated) front.push_back(i);
  }
  std::sort(front.begin(), front.end());
  return front;
}

}  // namespace kdnas
