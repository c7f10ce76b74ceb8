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

#ifndef KDNAS_EVALUATOR_H_
#define KDNAS_EVALUATOR_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kdnas/cost_model.h"
#include "kdnas/objective.h"
#include "kdnas/search_space.h"

namespace kdnas {

inline constexpr int kProtocolVersion = 1;

// Score recorded for failed and timed-out candidates. They never reach the
// surrogate.
inline constexpr double kFailureScore = 1e9;

// Proxy-task training settings forwarded to external workers.
struct ProxyConfig {
  double data_fraction = 0.1;
  int epochs = 9;
  double temperature = 1.0;
  double alpha = 0.7;
  double orth_lambda = 1e-4;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct EvalRequest {
  std::int64_t id = 0;
  ArchitectureSpec arch;
  int input_resolution = 32;
  ProxyConfig proxy;
};

enum class EvalStatus { kOk, kFailed, kTimeout };

std::string_view ToString(EvalStatus status);
EvalStatus ParseEvalStatus(std::string_view text);

struct EvalResult {
  std::int64_t id = 0;
  EvalStatus status = EvalStatus::kFailed;
  std::optional<double> top1;  // present iff status == kOk
  std::optional<double> measured_latency;  // seconds; overrides the proxy
  std::string reason;
};

nlohmann::json ToJson(const EvalRequest& req);
EvalRequest EvalRequestFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const EvalResult& res);
// Throws std::invalid_argument when the record breaks the wire schema.
EvalResult EvalResultFromJson(const nlohmann::json& j);

struct EvalJob {
  EvalRequest request;
  EncodedPoint point;
};

class AccuracyBackend {
 public:
  virtual ~AccuracyBackend() = default;
  // One result per job, in job order.
  virtual std::vector<EvalResult> Evaluate(std::span<const EvalJob> jobs) = 0;
};

// Deterministic stand-in for proxy training: top1 = SyntheticAccuracy(point).
class SyntheticBackend : public AccuracyBackend {
 public:
  std::vector<EvalResult> Evaluate(std::span<const EvalJob> jobs) override;
};

// External trainer processes speaking the line protocol. Each worker serves
// one request at a time; a batch is spread over up to `workers` processes.
// A worker that dies mid-request fails that request and is respawned; more
// than `max_respawns` respawns over the backend's lifetime is a WorkerError.
class SubprocessBackend : public AccuracyBackend {
 public:
  struct Options {
    std::string command;
    int workers = 1;
    std::chrono::milliseconds timeout = std::chrono::seconds(3600);
    std::chrono::milliseconds handshake_timeout = std::chrono::seconds(60);
    int max_respawns = 3;
  };

  // Launches and handshakes every worker; throws WorkerError on failure.
  explicit SubprocessBackend(Options options);
  ~SubprocessBackend() override;

  std::vector<EvalResult> Evaluate(std::span<const EvalJob> jobs) override;

  int respawns() const { return respawns_.load(); }
  const std::vector<std::string>& capabilities() const { return capabilities_; }

 private:
  struct Slot;
  EvalResult RunOne(Slot& slot, const EvalJob& job);
  void Respawn(Slot& slot);

  Options options_;
  std::vector<std::unique_ptr<Slot>> slots_;
  std::vector<std::string> capabilities_;
  std::atomic<int> respawns_{0};
};

struct Evaluation {
  std::int64_t id = 0;
  EvalStatus status = EvalStatus::kFailed;
  ArchitectureSpec arch;
  ResourceProfile profile;
  Metrics metrics;
  ScoreBreakdown score;
  std::string reason;
};

// Combines an analytic profile with a backend result. Failures (including a
// reported accuracy of zero) get kFailureScore.
Evaluation AssembleEvaluation(const ArchitectureSpec& arch,
                              const ResourceProfile& profile,
                              const EvalResult& result,
                              const TeacherBudget& budget, double epsilon);

class Evaluator {
 public:
  Evaluator(SearchSpaceDef space, TeacherBudget budget, double epsilon,
            LatencyModelConfig latency, ProxyConfig proxy,
            std::unique_ptr<AccuracyBackend> backend);

  struct Candidate {
    std::int64_t id = 0;
    EncodedPoint point;
  };

  // Results come back in candidate order.
  std::vector<Evaluation> EvaluateBatch(std::span<const Candidate> batch);

  const SearchSpaceDef& space() const { return space_; }

 private:
  SearchSpaceDef space_;
  TeacherBudget budget_;
  double epsilon_;
  LatencyModelConfig latency_;
  ProxyConfig proxy_;
  std::unique_ptr<AccuracyBackend> backend_;
};

}  // namespace kdnas

#endif  // KDNAS_EVALUATOR_H_
