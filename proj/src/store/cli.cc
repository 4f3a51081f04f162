// Copyright 2026 The Mutspec Authors
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

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

#include "CLI11.hpp"
#include "mutspec/error.h"
#include "mutspec/workflow.h"

namespace mutspec {

namespace {

constexpr int kUsageExit = 2;

void LogToStderr() {
  auto logger = spdlog::get("mutspec");
  if (!logger) logger = spdlog::stderr_logger_mt("mutspec");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%^%l%$: %v");
}

}  // namespace

int CliMain(int argc, char** argv) {
  LogToStderr();
  CLI::App app{"mutation-based postcondition completeness toolkit", "mutspec"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string store_path = "mutspec-store";
  std::uint64_t seed = 42;
  int workers = 1;
  std::string run_id;
  bool allow_short = false;
  std::string ablation;
  bool quiet = false;

  app.add_option("--config", config_path, "config file (JSON)");
  app.add_option("--store", store_path, "result store directory")
      ->capture_default_str();
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--workers", workers, "harness worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--run", run_id, "run id (default: latest)");
  app.add_flag("--quiet", quiet, "warnings and errors only");

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"scan", "parse the corpus, measure methods, start a run"},
      {"select", "farthest-first selection of candidate methods"},
      {"mutate", "generate operator (and LLM) mutants"},
      {"filter-mutants", "keep mutants that fail the test suite"},
      {"evaluate", "build kill matrices and record verdicts"},
      {"metrics", "aggregate results into metrics.json"},
      {"ablate", "mutant-set ablations over the kill matrices"},
      {"repair-env", "LLM-assisted environment repair loop"},
      {"report", "write report.txt, report.csv and gaps.csv"},
  };
  std::map<std::string, CLI::App*> cmd;
  for (const Sub& s : subs) cmd[s.name] = app.add_subcommand(s.name, s.help);
  cmd["filter-mutants"]->add_flag("--allow-short", allow_short,
                                  "drop tasks with too few mutants instead of failing");
  cmd["ablate"]->add_option("--spec", ablation, "one ablation, e.g. BUDGET(0.5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsageExit;
  }
  if (quiet) spdlog::set_level(spdlog::level::warn);

  std::string name = app.get_subcommands().front()->get_name();
  if (config_path.empty()) {
    std::cerr << "error: --config is required\n\n" << app.help();
    return kUsageExit;
  }
  try {
    WorkflowContext ctx{LoadToolConfig(config_path), Store(store_path)};
    ctx.seed = seed;
    ctx.workers = workers;
    if (!run_id.empty()) ctx.run_id = run_id;
    ctx.allow_short = allow_short;
    if (!ablation.empty()) ctx.ablation = ablation;

    if (name == "scan") {
      std::cout << RunScan(ctx) << "\n";
    } else if (name == "select") {
      RunSelect(ctx);
    } else if (name == "mutate") {
      RunMutate(ctx);
    } else if (name == "filter-mutants") {
      RunFilterMutants(ctx);
    } else if (name == "evaluate") {
      RunEvaluate(ctx);
    } else if (name == "metrics") {
      std::cout << RunMetrics(ctx).dump(2) << "\n";
    } else if (name == "ablate") {
      std::cout << RunAblate(ctx).dump(2) << "\n";
    } else if (name == "report") {
      std::cout << RunReport(ctx).string() << "\n";
    } else if (name == "repair-env") {
      RepairReport r = RunRepairEnv(ctx);
      std::cout << (r.success ? "repaired" : "not repaired") << " after "
                << r.rounds.size() - 1 << " round(s), " << r.accepted_edits()
                << " edit(s)\n";
      return r.success ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(ErrorCode::kIoError);
  }
  return 0;
}

}  // namespace mutspec
