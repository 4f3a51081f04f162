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

#ifndef MUTSPEC_WORKFLOW_H_
#define MUTSPEC_WORKFLOW_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mutspec/harness.h"
#include "mutspec/llmclient.h"
#include "mutspec/pipeline.h"
#include "mutspec/store.h"

namespace mutspec {

struct RepairConfig {
  std::filesystem::path project;
  RunnerSpec check;  // PROCESS
  int max_rounds = 5;
  std::set<std::string> allowlist = DefaultConfigAllowlist();
};

struct EmbeddingConfig {
  std::string endpoint;
  std::string model;
  std::string auth_env_var = "MUTSPEC_API_KEY";
};

// A single JSON document. Relative paths resolve against the config file's
// directory. Secrets never appear in it: credentials are read from the
// environment variable each client names.
struct ToolConfig {
  std::filesystem::path path;
  std::string raw;  // byte-exact file contents
  std::filesystem::path corpus;
  std::string adapter = std::string(kFixtureAdapterId);
  std::string extension = ".fx";
  std::string test_suffix = "_test";
  std::filesystem::path catalog;
  std::optional<std::filesystem::path> coverage_report;
  RunnerSpec runner;
  TransportConfig transport;
  bool llm_mutation = false;
  std::filesystem::path samples;
  SelectionConfig selection;
  std::vector<int> k_values{1, 3, 5};
  std::vector<std::string> ablations;
  int trials = 10;
  std::optional<RepairConfig> repair;
  std::optional<EmbeddingConfig> embedding;
};

// Throws kIoError (unreadable), kInvalidArgument (malformed).
ToolConfig LoadToolConfig(const std::filesystem::path& path);

struct WorkflowContext {
  ToolConfig config;
  Store store;
  std::uint64_t seed = 0;
  int workers = 1;
  std::optional<std::string> run_id{};  // default: the latest run
  bool allow_short = false;
  std::optional<std::string> ablation{};  // ablate: a single spec
};

// Each stage reads and writes under <store>/runs/<run_id>/:
//   scan            methods.jsonl, candidates.jsonl   (starts a new run)
//   select          selected.jsonl
//   mutate          mutants/<task>.jsonl, mutants/<task>/<id>.diff
//   filter-mutants  mutants/<task>.jsonl (statuses), tasks.json, instances/
//   evaluate        matrices/<task>.json, journal/<task>.jsonl, results
//   metrics         metrics.json
//   ablate          ablation.json
//   report          <store>/reports/<run_id>/
//   repair-env      repair.json
std::string RunScan(WorkflowContext& ctx);
void RunSelect(WorkflowContext& ctx);
void RunMutate(WorkflowContext& ctx);
// Throws kTooFewMutants, after writing its outputs, when some task is short
// and allow_short is off; with it on, short tasks are dropped.
void RunFilterMutants(WorkflowContext& ctx);
void RunEvaluate(WorkflowContext& ctx);
nlohmann::json RunMetrics(WorkflowContext& ctx);
nlohmann::json RunAblate(WorkflowContext& ctx);
std::filesystem::path RunReport(WorkflowContext& ctx);
// Returns the report; throws kEmptySelection when no repair is configured.
RepairReport RunRepairEnv(WorkflowContext& ctx);

// Postcondition samples: one JSON object per line,
//   {"task", "model", "setting", "index", "set": {"conditions": [...]}}.
struct PostconditionSample {
  std::string task_id;
  std::string model_tag;
  Setting setting = Setting::kC2P;
  int index = 0;
  PostconditionSet set;  // set_id = <model>.<setting>.<index>
};
std::vector<PostconditionSample> LoadSamples(const std::filesystem::path& path);

// Loads the corpus and returns one task per (non-test) method, with every
// test unit of the corpus as its suite.
struct Corpus {
  std::vector<SourceUnit> sources;
  std::vector<SourceUnit> tests;
};
Corpus LoadCorpus(const ToolConfig& config);
TaskContext TaskFor(const Corpus& corpus, const std::string& method_id);

// Entry point of the command line tool.
int CliMain(int argc, char** argv);

}  // namespace mutspec

#endif  // MUTSPEC_WORKFLOW_H_
