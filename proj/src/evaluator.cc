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

#include "kdnas/evaluator.h"

#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "kdnas/errors.h"
#include "kdnas/random.h"
#include "kdnas/synthetic.h"
#include "kdnas/worker.h"

namespace kdnas {

void ProxyConfig::Validate() const {
  if (!(data_fraction > 0.0 && data_fraction <= 1.0)) {
    throw std::invalid_argument("proxy data_fraction must be in (0, 1]");
  }
  if (epochs < 1) throw std::invalid_argument("proxy epochs must be >= 1");
  if (!(temperature > 0.0)) throw std::invalid_argument("proxy temperature must be > 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("proxy alpha must be in [0, 1]");
  if (!(orth_lambda >= 0.0)) throw std::invalid_argument("proxy orth_lambda must be >= 0");
}

std::string_view ToString(EvalStatus status) {
  switch (status) {
    case EvalStatus::kOk:
      return "ok";
    case EvalStatus::kFailed:
      return "failed";
    case EvalStatus::kTimeout:
      return "timeout";
  }
  return "failed";
}

EvalStatus ParseEvalStatus(std::string_view text) {
  if (text == "ok") return EvalStatus::kOk;
  if (text == "failed") return EvalStatus::kFailed;
  if (text == "timeout") return EvalStatus::kTimeout;
  throw std::invalid_argument("unknown status '" + std::string(text) + "'");
}

nlohmann::json ToJson(const EvalRequest& req) {
  return {{"id", req.id},
          {"arch", ToJson(req.arch)},
          {"input_resolution", req.input_resolution},
          {"proxy",
           {{"data_fraction", req.proxy.data_fraction},
            {"epochs", req.proxy.epochs},
            {"temperature", req.proxy.temperature},
            {"alpha", req.proxy.alpha},
            {"orth_lambda", req.proxy.orth_lambda},
            {"seed", req.proxy.seed}}}};
}

EvalRequest EvalRequestFromJson(const nlohmann::json& j) {
  EvalRequest req;
  req.id = j.at("id").get<std::int64_t>();
  req.arch = ArchitectureFromJson(j.at("arch"));
  req.input_resolution = j.at("input_resolution").get<int>();
  const auto& p = j.at("proxy");
  req.proxy.data_fraction = p.at("data_fraction").get<double>();
  req.proxy.epochs = p.at("epochs").get<int>();
  req.proxy.temperature = p.at("temperature").get<double>();
  req.proxy.alpha = p.at("alpha").get<double>();
  req.proxy.orth_lambda = p.at("orth_lambda").get<double>();
  req.proxy.seed = p.at("seed").get<std::uint64_t>();
  req.proxy.Validate();
  return req;
}

nlohmann::json ToJson(const EvalResult& res) {
  nlohmann::json j = {{"id", res.id}, {"status", ToString(res.status)}};
  if (res.top1) j["top1"] = *res.top1;
  if (res.measured_latency) j["measured_latency"] = *res.measured_latency;
  if (!res.reason.empty()) j["reason"] = res.reason;
  return j;
}

EvalResult EvalResultFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("result must be an object");
  EvalResult res;
  try {
    res.id = j.at("id").get<std::int64_t>();
    res.status = ParseEvalStatus(j.at("status").get<std::string>());
    if (j.contains("top1") && !j["top1"].is_null()) res.top1 = j["top1"].get<double>();
    if (j.contains("measured_latency") && !j["measured_latency"].is_null()) {
      res.measured_latency = j["measured_latency"].get<double>();
    }
    if (j.contains("reason")) res.reason = j["reason"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed result: ") + e.what());
  }
  if (res.top1.has_value() != (res.status == EvalStatus::kOk)) {
    throw std::invalid_argument("top1 must be present exactly when status is ok");
  }
  if (res.top1 && !(*res.top1 >= 0.0 && *res.top1 <= 1.0)) {
    throw std::invalid_argument("top1 must be in [0, 1]");
  }
  if (res.measured_latency &&
      !(std::isfinite(*res.measured_latency) && *res.measured_latency >= 0.0)) {
    throw std::invalid_argument("measured_latency must be a finite non-negative value");
  }
  return res;
}

std::vector<EvalResult> SyntheticBackend::Evaluate(std::span<const EvalJob> jobs) {
  std::vector<EvalResult> out;
  out.reserve(jobs.size());
  for (const EvalJob& job : jobs) {
    EvalResult r;
    r.id = job.request.id;
    r.status = EvalStatus::kOk;
    r.top1 = SyntheticAccuracy(job.point);
    out.push_back(std::move(r));
  }
  return out;
}

struct SubprocessBackend::Slot {
  std::unique_ptr<WorkerProcess> process;
};

SubprocessBackend::SubprocessBackend(Options options) : options_(std::move(options)) {
  if (options_.command.empty()) throw WorkerError("no worker command configured");
  if (options_.workers < 1) throw WorkerError("need at least one worker");
  for (int i = 0; i < options_.workers; ++i) {
    auto slot = std::make_unique<Slot>();
    slot->process = std::make_unique<WorkerProcess>(options_.command);
    capabilities_ = slot->process->Handshake(kProtocolVersion, options_.handshake_timeout);
    slots_.push_back(std::move(slot));
  }
}

SubprocessBackend::~SubprocessBackend() = default;

void SubprocessBackend::Respawn(Slot& slot) {
  if (respawns_.fetch_add(1) + 1 > options_.max_respawns) {
    throw WorkerError("worker respawn limit (" + std::to_string(options_.max_respawns) +
                      ") exceeded");
  }
  slot.process = std::make_unique<WorkerProcess>(options_.command);
  slot.process->Handshake(kProtocolVersion, options_.handshake_timeout);
}

EvalResult SubprocessBackend::RunOne(Slot& slot, const EvalJob& job) {
  if (!slot.process) Respawn(slot);
  EvalResult res;
  res.id = job.request.id;
  if (!slot.process->SendLine(ToJson(job.request).dump())) {
    slot.process.reset();
    res.reason = "worker exited";
    return res;
  }
  std::string line;
  switch (slot.process->ReadLine(&line, options_.timeout)) {
    case WorkerProcess::ReadStatus::kEof:
      slot.process.reset();
      res.reason = "worker exited mid-request";
      return res;
    case WorkerProcess::ReadStatus::kTimeout:
      slot.process.reset();  // kills it
      res.status = EvalStatus::kTimeout;
      res.reason = "worker timed out";
      return res;
    case WorkerProcess::ReadStatus::kLine:
      break;
  }
  const auto reply = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  try {
    if (reply.is_discarded()) throw std::invalid_argument("not a JSON record");
    EvalResult parsed = EvalResultFromJson(reply);
    if (parsed.id != job.request.id) throw std::invalid_argument("reply id does not match");
    return parsed;
  } catch (const std::invalid_argument& e) {
    res.status = EvalStatus::kFailed;
    res.reason = std::string("malformed worker reply: ") + e.what();
    return res;
  }
}

std::vector<EvalResult> SubprocessBackend::Evaluate(std::span<const EvalJob> jobs) {
  std::vector<EvalResult> out(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr error;
  auto serve = [&](Slot& slot) {
    try {
      for (std::size_t i = next++; i < jobs.size(); i = next++) {
        out[i] = RunOne(slot, jobs[i]);
      }
    } catch (...) {
      std::lock_guard lock(error_mu);
      if (!error) error = std::current_exception();
    }
  };
  const std::size_t n = std::min(slots_.size(), jobs.size());
  if (n <= 1) {
    if (n == 1) serve(*slots_[0]);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < n; ++w) threads.emplace_back(serve, std::ref(*slots_[w]));
  }
  if (error) std::rethrow_exception(error);
  return out;
}

Evaluation AssembleEvaluation(const ArchitectureSpec& arch,
                              const ResourceProfile& profile,
                              const EvalResult& result,
                              const TeacherBudget& budget, double epsilon) {
  Evaluation ev;
  ev.id = result.id;
  ev.arch = arch;
  ev.profile = profile;
  ev.status = result.status;
  ev.reason = result.reason;
  ev.metrics.np_student = profile.params;
  ev.metrics.flops_student = profile.flops;
  ev.metrics.latency_student = result.measured_latency.value_or(profile.latency_proxy);
  if (result.status == EvalStatus::kOk && result.top1 && *result.top1 > 0.0) {
    ev.metrics.acc_student = *result.top1;
    ev.score = KdScore(ev.metrics, budget, epsilon);
    return ev;
  }
  if (result.status == EvalStatus::kOk) {
    ev.status = EvalStatus::kFailed;
    ev.reason = "zero accuracy";
  }
  ev.metrics.acc_student = 0.0;
  ev.score = ScoreBreakdown{0.0, 0, kFailureScore};
  return ev;
}

Evaluator::Evaluator(SearchSpaceDef space, TeacherBudget budget, double epsilon,
                     LatencyModelConfig latency, ProxyConfig proxy,
                     std::unique_ptr<AccuracyBackend> backend)
    : space_(std::move(space)),
      budget_(budget),
      epsilon_(epsilon),
      latency_(latency),
      proxy_(proxy),
      backend_(std::move(backend)) {
  budget_.Validate();
  proxy_.Validate();
  if (!(epsilon_ > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!backend_) throw std::invalid_argument("evaluator needs a backend");
}

std::vector<Evaluation> Evaluator::EvaluateBatch(std::span<const Candidate> batch) {
  std::vector<EvalJob> jobs;
  std::vector<ResourceProfile> profiles;
  jobs.reserve(batch.size());
  for (const Candidate& c : batch) {
    EvalJob job;
    job.point = c.point;
    job.request.id = c.id;
    job.request.arch = Decode(space_, c.point);
    job.request.input_resolution = space_.input_resolution();
    job.request.proxy = proxy_;
    job.request.proxy.seed = DeriveSeed(proxy_.seed, {static_cast<std::uint64_t>(c.id)});
    profiles.push_back(Profile(space_, job.request.arch, latency_));
    jobs.push_back(std::move(job));
  }
  const std::vector<EvalResult> results = backend_->Evaluate(jobs);
  if (results.size() != jobs.size()) {
    throw std::logic_error("backend returned the wrong number of results");
  }
  std::vector<Evaluation> out;
  out.reserve(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    EvalResult r = results[i];
    r.id = jobs[i].request.id;
    out.push_back(AssembleEvaluation(jobs[i].request.arch, profiles[i], r, budget_, epsilon_));
  }
  return out;
}

}  // namespace kdnas
