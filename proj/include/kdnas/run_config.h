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

#ifndef KDNAS_RUN_CONFIG_H_
#define KDNAS_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "kdnas/cost_model.h"
#include "kdnas/evaluator.h"
#include "kdnas/objective.h"
#include "kdnas/search_space.h"
#include "kdnas/trust_region.h"

namespace kdnas {

enum class BackendKind { kSynthetic, kSubprocess };

std::string_view ToString(BackendKind kind);
BackendKind ParseBackendKind(std::string_view text);

// Default accuracy target for runs that do not set one: reachable on the
// synthetic oracle within a squared distance of 0.1 d ln 4/3 of its optimum.
inline constexpr double kDefaultAccTarget = 0.80;

struct RunConfig {
  SearchSpaceDef space = SearchSpaceDef::Default();
  std::string space_source = "default";
  std::uint64_t seed = 0;
  std::int64_t budget = 200;
  BackendKind backend = BackendKind::kSynthetic;
  std::string worker_cmd;
  int workers = 1;
  double timeout_seconds = 3600.0;
  int max_respawns = 3;
  double epsilon = kDefaultEpsilon;
  TeacherBudget teacher;
  OptimizerConfig optimizer;
  LatencyModelConfig latency;
  ProxyConfig proxy;
  std::filesystem::path out_dir = "run";

  // Copies `seed` into the optimizer and proxy settings, then checks
  // everything. Throws ConfigError.
  void Finalize();
};

// The architecture with every field at its last menu entry.
ArchitectureSpec LargestArchitecture(const SearchSpaceDef& space);

// Teacher budget defaulting to the largest architecture's profile.
TeacherBudget DefaultTeacher(const SearchSpaceDef& space, const LatencyModelConfig& latency);

// Reads a key-value run config. A relative `space` path resolves against the
// config file's directory. Unknown keys are a ConfigError.
RunConfig LoadRunConfig(const std::filesystem::path& path);
RunConfig ParseRunConfig(std::string_view text, const std::filesystem::path& base_dir,
                         std::string source = "<string>");

nlohmann::json ToJson(const RunConfig& cfg);
RunConfig RunConfigFromJson(const nlohmann::json& j);

}  // namespace kdnas

#endif  // KDNAS_RUN_CONFIG_H_
