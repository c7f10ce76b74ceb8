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

// kdnas command-line driver.
//
//   kdnas search <config>      trust-region search
//   kdnas random <config>      random-search baseline, same record format
//   kdnas report <history>     Pareto / curve / region CSVs
//   kdnas resume <checkpoint>  continue an interrupted search
//
// Exit codes: 0 success, 2 configuration error, 3 worker failure.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "kdnas/errors.h"
#include "kdnas/report.h"
#include "kdnas/run_config.h"
#include "kdnas/runner.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitWorker = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> budget;
  std::optional<std::string> backend;
  std::optional<std::string> worker_cmd;
  std::optional<std::string> out;
};

void AddRunFlags(CLI::App* cmd, Overrides* o) {
  cmd->add_option("--seed", o->seed, "Random seed");
  cmd->add_option("--budget", o->budget, "Total number of evaluations");
  cmd->add_option("--backend", o->backend, "Accuracy backend")
      ->check(CLI::IsMember({"synthetic", "subprocess"}));
  cmd->add_option("--worker-cmd", o->worker_cmd, "Worker command line (subprocess backend)");
  cmd->add_option("--out", o->out, "Output directory");
}

kdnas::RunConfig LoadWithOverrides(const std::string& path, const Overrides& o) {
  kdnas::RunConfig cfg = kdnas::LoadRunConfig(path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.budget) cfg.budget = *o.budget;
  if (o.backend) cfg.backend = kdnas::ParseBackendKind(*o.backend);
  if (o.worker_cmd) cfg.worker_cmd = *o.worker_cmd;
  if (o.out) cfg.out_dir = *o.out;
  cfg.Finalize();
  return cfg;
}

void PrintSummary(const kdnas::RunSummary& s, const std::filesystem::path& dir) {
  std::cout << s.mode << ": " << s.evaluations << " evaluations (" << s.failures
            << " failed), pareto size " << s.pareto_size;
  if (s.best) {
    std::cout << ", best score " << s.best->score.score << " (candidate " << s.best->id
              << ", acc " << s.best->metrics.acc_student << ")";
  }
  std::cout << "\nresults in " << dir.string() << "\n";
  if (s.corrupt_lines > 0) {
    std::cerr << "warning: skipped " << s.corrupt_lines << " corrupt history line(s)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-region architecture search under a distillation-aware score"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string search_cfg, random_cfg, history_path, checkpoint_path;
  Overrides search_over, random_over;
  std::optional<std::string> report_out;
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress output");

  auto* search = app.add_subcommand("search", "Run the trust-region search");
  search->add_option("config", search_cfg, "Run config file")->required();
  AddRunFlags(search, &search_over);

  auto* random = app.add_subcommand("random", "Run the random-search baseline");
  random->add_option("config", random_cfg, "Run config file")->required();
  AddRunFlags(random, &random_over);

  auto* report = app.add_subcommand("report", "Write report CSVs for a history file");
  report->add_option("history", history_path, "history.jsonl")->required();
  report->add_option("--out", report_out, "Output directory (default: next to the history)");

  auto* resume = app.add_subcommand("resume", "Continue a search from its checkpoint");
  resume->add_option("checkpoint", checkpoint_path, "checkpoint.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  kdnas::RunControl control;
  if (!quiet) control.log = &std::cerr;
  try {
    if (*search) {
      const auto cfg = LoadWithOverrides(search_cfg, search_over);
      PrintSummary(kdnas::RunSearch(cfg, control), cfg.out_dir);
    } else if (*random) {
      const auto cfg = LoadWithOverrides(random_cfg, random_over);
      PrintSummary(kdnas::RunRandom(cfg, control), cfg.out_dir);
    } else if (*resume) {
      const std::filesystem::path cp = checkpoint_path;
      PrintSummary(kdnas::ResumeSearch(cp, control), cp.parent_path());
    } else if (*report) {
      const std::filesystem::path h = history_path;
      const auto files = kdnas::WriteReport(h, report_out ? std::filesystem::path(*report_out) : h.parent_path());
      if (files.corrupt_lines > 0) {
        std::cerr << "warning: skipped " << files.corrupt_lines << " corrupt history line(s)\n";
      }
      std::cout << "pareto front: " << files.pareto_rows << " rows -> " << files.pareto.string()
                << "\ncurve -> " << files.curve.string() << "\nregions -> "
                << files.regions.string() << "\ncorrupt lines: " << files.corrupt_lines << "\n";
    }
  } catch (const kdnas::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const kdnas::WorkerError& e) {
    std::cerr << "worker error: " << e.what() << "\n";
    return kExitWorker;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
