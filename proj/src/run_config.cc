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

#include "kdnas/run_config.h"

#include <cmath>
#include <fstream>
#include <iterator>
#include <vector>

#include "kdnas/errors.h"
#include "kdnas/kv_config.h"
#include "kdnas/turbo.h"

namespace kdnas {

std::string_view ToString(BackendKind kind) {
  return kind == BackendKind::kSynthetic ? "synthetic" : "subprocess";
}

BackendKind ParseBackendKind(std::string_view text) {
  if (text == "synthetic") return BackendKind::kSynthetic;
  if (text == "subprocess") return BackendKind::kSubprocess;
  throw ConfigError("unknown backend '" + std::string(text) + "'");
}

ArchitectureSpec LargestArchitecture(const SearchSpaceDef& space) {
  return Decode(space, EncodedPoint(std::vector<double>(space.dimensionality(), 1.0)));
}

TeacherBudget DefaultTeacher(const SearchSpaceDef& space, const LatencyModelConfig& latency) {
  const ResourceProfile p = Profile(space, LargestArchitecture(space), latency);
  TeacherBudget b;
  b.np_teacher = p.params;
  b.flops_teacher = p.flops;
  b.latency_teacher = p.latency_proxy;
  b.acc_target = kDefaultAccTarget;
  return b;
}

void RunConfig::Finalize() {
  optimizer.seed = seed;
  proxy.seed = seed;
  try {
    optimizer.Validate();
    teacher.Validate();
    proxy.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (budget < static_cast<std::int64_t>(optimizer.n_init) * optimizer.n_regions) {
    throw ConfigError("budget " + std::to_string(budget) + " is below n_init * n_regions = " +
                      std::to_string(optimizer.n_init * optimizer.n_regions));
  }
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(latency.per_flop >= 0.0 && latency.per_param >= 0.0 && latency.per_layer >= 0.0)) {
    throw ConfigError("latency coefficients must be >= 0");
  }
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (!(timeout_seconds > 0.0)) throw ConfigError("timeout must be > 0");
  if (max_respawns < 0) throw ConfigError("max_respawns must be >= 0");
  if (backend == BackendKind::kSubprocess && worker_cmd.empty()) {
    throw ConfigError("the subprocess backend needs worker_cmd");
  }
}

RunConfig ParseRunConfig(std::string_view text, const std::filesystem::path& base_dir,
                         std::string source) {
  const KeyValueFile kv = KeyValueFile::Parse(text, source);
  RunConfig c;
  if (kv.Has("space")) {
    std::filesystem::path p = kv.Get("space");
    if (p.is_relative()) p = base_dir / p;
    c.space = SearchSpaceDef::Load(p);
    c.space_source = p.string();
  }
  c.seed = static_cast<std::uint64_t>(kv.GetIntOr("seed", 0));
  c.budget = kv.GetIntOr("budget", c.budget);
  c.backend = ParseBackendKind(kv.GetOr("backend", "synthetic"));
  c.worker_cmd = kv.GetOr("worker_cmd", "");
  c.workers = static_cast<int>(kv.GetIntOr("workers", c.workers));
  c.timeout_seconds = kv.GetDoubleOr("timeout", c.timeout_seconds);
  c.max_respawns = static_cast<int>(kv.GetIntOr("max_respawns", c.max_respawns));
  c.epsilon = kv.GetDoubleOr("epsilon", c.epsilon);

  c.latency.per_flop = kv.GetDoubleOr("latency.per_flop", c.latency.per_flop);
  c.latency.per_param = kv.GetDoubleOr("latency.per_param", c.latency.per_param);
  c.latency.per_layer = kv.GetDoubleOr("latency.per_layer", c.latency.per_layer);

  const TeacherBudget fallback = DefaultTeacher(c.space, c.latency);
  c.teacher.np_teacher = kv.GetIntOr("teacher.params", fallback.np_teacher);
  c.teacher.flops_teacher = kv.GetIntOr("teacher.flops", fallback.flops_teacher);
  c.teacher.latency_teacher = kv.GetDoubleOr("teacher.latency", fallback.latency_teacher);
  c.teacher.acc_target = kv.GetDoubleOr("teacher.acc_target", fallback.acc_target);

  OptimizerConfig& o = c.optimizer;
  o.n_init = static_cast<int>(kv.GetIntOr("optimizer.n_init", o.n_init));
  o.n_regions = static_cast<int>(kv.GetIntOr("optimizer.n_regions", o.n_regions));
  o.batch_size = static_cast<int>(kv.GetIntOr("optimizer.batch_size", o.batch_size));
  o.candidates_per_proposal =
      static_cast<int>(kv.GetIntOr("optimizer.candidates", o.candidates_per_proposal));
  o.success_tolerance =
      static_cast<int>(kv.GetIntOr("optimizer.success_tolerance", o.success_tolerance));
  o.failure_tolerance =
      static_cast<int>(kv.GetIntOr("optimizer.failure_tolerance", o.failure_tolerance));
  o.length_init = kv.GetDoubleOr("optimizer.length_init", o.length_init);
  o.length_min = kv.GetDoubleOr("optimizer.length_min", o.length_min);
  o.length_max = kv.GetDoubleOr("optimizer.length_max", o.length_max);
  o.log_values = kv.GetBoolOr("optimizer.log_values", o.log_values);
  o.gp.restarts = static_cast<int>(kv.GetIntOr("optimizer.gp_restarts", o.gp.restarts));
  o.gp.iterations = static_cast<int>(kv.GetIntOr("optimizer.gp_iterations", o.gp.iterations));
  o.gp.noise_floor = kv.GetDoubleOr("optimizer.gp_noise_floor", o.gp.noise_floor);

  c.proxy.data_fraction = kv.GetDoubleOr("proxy.data_fraction", c.proxy.data_fraction);
  c.proxy.epochs = static_cast<int>(kv.GetIntOr("proxy.epochs", c.proxy.epochs));
  c.proxy.temperature = kv.GetDoubleOr("proxy.temperature", c.proxy.temperature);
  c.proxy.alpha = kv.GetDoubleOr("proxy.alpha", c.proxy.alpha);
  c.proxy.orth_lambda = kv.GetDoubleOr("proxy.orth_lambda", c.proxy.orth_lambda);

  c.out_dir = kv.GetOr("out", c.out_dir.string());

  const auto unknown = kv.Unread();
  if (!unknown.empty()) {
    throw ConfigError(kv.source() + ": unknown key '" + unknown.front() + "'");
  }
  c.Finalize();
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ParseRunConfig(text, path.parent_path(), path.string());
}

nlohmann::json ToJson(const RunConfig& c) {
  return {{"space", c.space.ToText()},
          {"space_source", c.space_source},
          {"seed", c.seed},
          {"budget", c.budget},
          {"backend", ToString(c.backend)},
          {"worker_cmd", c.worker_cmd},
          {"workers", c.workers},
          {"timeout", c.timeout_seconds},
          {"max_respawns", c.max_respawns},
          {"epsilon", c.epsilon},
          {"teacher",
           {{"params", c.teacher.np_teacher},
            {"flops", c.teacher.flops_teacher},
            {"latency", c.teacher.latency_teacher},
            {"acc_target", c.teacher.acc_target}}},
          {"optimizer", ToJson(c.optimizer)},
          {"latency",
           {{"per_flop", c.latency.per_flop},
            {"per_param", c.latency.per_param},
            {"per_layer", c.latency.per_layer}}},
          {"proxy",
           {{"data_fraction", c.proxy.data_fraction},
            {"epochs", c.proxy.epochs},
            {"temperature", c.proxy.temperature},
            {"alpha", c.proxy.alpha},
            {"orth_lambda", c.proxy.orth_lambda}}},
          {"out", c.out_dir.string()}};
}

RunConfig RunConfigFromJson(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.space = SearchSpaceDef::Parse(j.at("space").get<std::string>(), "checkpoint space");
    c.space_source = j.at("space_source").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.budget = j.at("budget").get<std::int64_t>();
    c.backend = ParseBackendKind(j.at("backend").get<std::string>());
    c.worker_cmd = j.at("worker_cmd").get<std::string>();
    c.workers = j.at("workers").get<int>();
    c.timeout_seconds = j.at("timeout").get<double>();
    c.max_respawns = j.at("max_respawns").get<int>();
    c.epsilon = j.at("epsilon").get<double>();
    const auto& t = j.at("teacher");
    c.teacher.np_teacher = t.at("params").get<std::int64_t>();
    c.teacher.flops_teacher = t.at("flops").get<std::int64_t>();
    c.teacher.latency_teacher = t.at("latency").get<double>();
    c.teacher.acc_target = t.at("acc_target").get<double>();
    c.optimizer = OptimizerConfigFromJson(j.at("optimizer"));
    const auto& l = j.at("latency");
    c.latency.per_flop = l.at("per_flop").get<double>();
    c.latency.per_param = l.at("per_param").get<double>();
    c.latency.per_layer = l.at("per_layer").get<double>();
    const auto& p = j.at("proxy");
    c.proxy.data_fraction = p.at("data_fraction").get<double>();
    c.proxy.epochs = p.at("epochs").get<int>();
    c.proxy.temperature = p.at("temperature").get<double>();
    c.proxy.alpha = p.at("alpha").get<double>();
    c.proxy.orth_lambda = p.at("orth_lambda").get<double>();
    c.out_dir = j.at("out").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }
  c.Finalize();
  return c;
}

}  // namespace kdnas
