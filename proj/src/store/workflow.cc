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

#include "mutspec/workflow.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>

#include "mutspec/error.h"
#include "mutspec/interpreter.h"
#include "mutspec/metrics.h"
#include "mutspec/mutgen.h"
#include "mutspec/text.h"
#include "mutspec/validate.h"

namespace mutspec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

TransportConfig ParseTransport(const json& j, const fs::path& base) {
  TransportConfig t;
  t.mode = ParseTransportMode(j.value("mode", "REPLAY"));
  t.endpoint = j.value("endpoint", "");
  if (j.contains("transcript")) {
    t.transcript_path = Resolve(base, j.at("transcript").get<std::string>());
  }
  t.auth_env_var = j.value("auth_env_var", t.auth_env_var);
  t.model = j.value("model", t.model);
  t.max_in_flight = j.value("max_in_flight", t.max_in_flight);
  t.timeout_ms = j.value("timeout_ms", t.timeout_ms);
  return t;
}

// Task ids become file names.
void RequireFileSafe(const std::string& id) {
  if (id.empty() || id.find('/') != std::string::npos || id == "." ||
      id == ".." || id.find('\\') != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "id '" + id + "' is not file safe");
  }
}

std::string RunId(WorkflowContext& ctx) {
  if (!ctx.run_id) ctx.run_id = ctx.store.LatestRun();
  return *ctx.run_id;
}

fs::path RunDir(WorkflowContext& ctx) { return ctx.store.run_dir(RunId(ctx)); }

template <typename T>
void WriteJsonl(const fs::path& path, const std::vector<T>& items) {
  std::string out;
  for (const T& x : items) out += json(x).dump() + "\n";
  WriteFileAtomic(path, out);
}

template <typename T>
std::vector<T> ReadJsonl(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kIoError, path.string() + " is missing; run the earlier stage first");
  }
  std::vector<T> out;
  int n = 0;
  for (const std::string& line : SplitLines(ReadFile(path))) {
    ++n;
    if (Trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line).get<T>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kIoError,
                  path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

json ReadJson(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kIoError, path.string() + " is missing; run the earlier stage first");
  }
  try {
    return json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIoError, path.string() + ": " + e.what());
  }
}

std::vector<MethodRecord> TaskMethods(WorkflowContext& ctx) {
  fs::path dir = RunDir(ctx);
  fs::path selected = dir / "selected.jsonl";
  return ReadJsonl<MethodRecord>(fs::exists(selected) ? selected
                                                      : dir / "candidates.jsonl");
}

std::vector<std::string> ViableTasks(WorkflowContext& ctx) {
  return ReadJson(RunDir(ctx) / "tasks.json").get<std::vector<std::string>>();
}

std::vector<KillMatrix> LoadMatrices(WorkflowContext& ctx) {
  std::vector<KillMatrix> out;
  for (const std::string& task : ViableTasks(ctx)) {
    fs::path p = RunDir(ctx) / "matrices" / (task + ".json");
    if (fs::exists(p)) out.push_back(ReadJson(p).get<KillMatrix>());
  }
  if (out.empty()) {
    throw Error(ErrorCode::kEmptySelection, "no kill matrices; run evaluate first");
  }
  return out;
}

}  // namespace

ToolConfig LoadToolConfig(const fs::path& path) {
  ToolConfig c;
  c.path = path;
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::kIoError, "cannot read config " + path.string());
  }
  c.raw = ReadFile(path);
  fs::path base = fs::absolute(path).parent_path();
  try {
    json j = json::parse(c.raw);
    c.corpus = Resolve(base, j.at("corpus").get<std::string>());
    c.adapter = j.value("adapter", c.adapter);
    c.extension = j.value("extension", c.extension);
    c.test_suffix = j.value("test_suffix", c.test_suffix);
    c.catalog = Resolve(base, j.at("catalog").get<std::string>());
    if (j.contains("coverage_report")) {
      c.coverage_report = Resolve(base, j.at("coverage_report").get<std::string>());
    }
    if (j.contains("runner")) {
      c.runner = j.at("runner").get<RunnerSpec>();
      if (!c.runner.working_dir.empty()) {
        c.runner.working_dir = Resolve(base, c.runner.working_dir.string());
      }
    }
    if (j.contains("transport")) c.transport = ParseTransport(j.at("transport"), base);
    c.llm_mutation = j.value("llm_mutation", false);
    if (j.contains("samples")) c.samples = Resolve(base, j.at("samples").get<std::string>());
    if (j.contains("selection")) c.selection = j.at("selection").get<SelectionConfig>();
    c.k_values = j.value("k_values", c.k_values);
    c.ablations = j.value("ablations", c.ablations);
    c.trials = j.value("trials", c.trials);
    if (j.contains("repair")) {
      const json& r = j.at("repair");
      RepairConfig rc;
      rc.project = Resolve(base, r.at("project").get<std::string>());
      rc.check.mode = RunnerMode::kProcess;
      rc.check.test_command = r.at("check").get<std::string>();
      rc.check.timeout_ms = r.value("timeout_ms", rc.check.timeout_ms);
      rc.max_rounds = r.value("max_rounds", rc.max_rounds);
      if (r.contains("allowlist")) {
        rc.allowlist = r.at("allowlist").get<std::set<std::string>>();
      }
      c.repair = rc;
    }
    if (j.contains("embedding")) {
      const json& e = j.at("embedding");
      EmbeddingConfig ec;
      ec.endpoint = e.at("endpoint").get<std::string>();
      ec.model = e.at("model").get<std::string>();
      ec.auth_env_var = e.value("auth_env_var", ec.auth_env_var);
      c.embedding = ec;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
  for (int k : c.k_values) {
    if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k values must be >= 1");
  }
  if (c.trials < 1) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  return c;
}

Corpus LoadCorpus(const ToolConfig& config) {
  if (!fs::is_directory(config.corpus)) {
    throw Error(ErrorCode::kIoError, "corpus " + config.corpus.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(config.corpus)) {
    if (e.is_regular_file() && e.path().extension() == config.extension) {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  Corpus c;
  for (const fs::path& f : files) {
    std::string rel = fs::relative(f, config.corpus).generic_string();
    SourceUnit u = ParseUnit(ReadFile(f), config.adapter, rel);
    bool is_test = f.stem().string().ends_with(config.test_suffix);
    (is_test ? c.tests : c.sources).push_back(std::move(u));
  }
  return c;
}

TaskContext TaskFor(const Corpus& corpus, const std::string& method_id) {
  TaskContext t;
  bool found = false;
  for (const SourceUnit& u : corpus.sources) {
    bool here = false;
    for (const MethodRecord& m : ExtractMethods(u)) {
      if (m.method_id == method_id) {
        t.unit = u;
        t.method = m;
        here = found = true;
      }
    }
    // Other sources ride along so cross-unit calls resolve.
    if (!here) t.tests.push_back(u);
  }
  if (!found) {
    throw Error(ErrorCode::kInvalidArgument, "no method " + method_id + " in the corpus");
  }
  t.task_id = method_id;
  t.tests.insert(t.tests.begin(), corpus.tests.begin(), corpus.tests.end());
  return t;
}

std::vector<PostconditionSample> LoadSamples(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::kIoError, "cannot read samples " + path.string());
  }
  std::vector<PostconditionSample> out;
  int n = 0;
  for (const std::string& line : SplitLines(ReadFile(path))) {
    ++n;
    if (Trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      PostconditionSample s;
      s.task_id = j.at("task").get<std::string>();
      s.model_tag = j.at("model").get<std::string>();
      s.setting = ParseSetting(j.at("setting").get<std::string>());
      s.index = j.at("index").get<int>();
      json set = j.at("set");
      set["set_id"] = s.model_tag + "." + std::string(SettingName(s.setting)) +
                      "." + std::to_string(s.index);
      s.set = set.get<PostconditionSet>();
      out.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::string RunScan(WorkflowContext& ctx) {
  const ToolConfig& cfg = ctx.config;
  Corpus corpus = LoadCorpus(cfg);
  std::optional<CoverageTable> table;
  if (cfg.coverage_report) {
    table = ParseCoverageReport(ReadFile(*cfg.coverage_report));
  } else if (cfg.runner.mode == RunnerMode::kBuiltin) {
    std::vector<fixture::ProgramFile> files;
    for (const auto* group : {&corpus.sources, &corpus.tests}) {
      for (const SourceUnit& u : *group) files.push_back({u.path, u.text});
    }
    fixture::RunOptions opt;
    opt.collect_coverage = true;
    opt.max_steps = cfg.runner.max_steps;
    opt.timeout_ms = cfg.runner.timeout_ms;
    fixture::RunResult run = fixture::RunTests(files, opt);
    if (run.exit_code != 0) {
      spdlog::warn("corpus suite does not pass cleanly (exit {}): {}",
                   run.exit_code, run.out + run.err);
    }
    table = run.coverage;
  }
  std::vector<MethodRecord> methods;
  for (const SourceUnit& u : corpus.sources) {
    for (MethodRecord m : ExtractMethods(u)) {
      if (table) m.coverage = MethodCoverage(*table, m);
      methods.push_back(std::move(m));
    }
  }
  std::vector<MethodRecord> candidates = FilterCandidateMethods(methods, cfg.selection);

  RunManifest manifest;
  manifest.run_id = ctx.run_id.value_or(NewRunId());
  manifest.config_snapshot = cfg.raw;
  manifest.tool_version = std::string(kToolVersion);
  manifest.seed = ctx.seed;
  manifest.started = UtcNow();
  ctx.store.BeginRun(manifest);
  ctx.run_id = manifest.run_id;
  WriteJsonl(RunDir(ctx) / "methods.jsonl", methods);
  WriteJsonl(RunDir(ctx) / "candidates.jsonl", candidates);
  spdlog::info("scan: {} methods, {} candidates, run {}", methods.size(),
               candidates.size(), manifest.run_id);
  return manifest.run_id;
}

void RunSelect(WorkflowContext& ctx) {
  std::vector<MethodRecord> cands =
      ReadJsonl<MethodRecord>(RunDir(ctx) / "candidates.jsonl");
  std::size_t target = static_cast<std::size_t>(ctx.config.selection.target_count);
  std::vector<MethodRecord> picked;
  if (target == 0 || target >= cands.size()) {
    if (target > cands.size()) {
      throw Error(ErrorCode::kCountExceedsPopulation,
                  "target " + std::to_string(target) + " > " +
                      std::to_string(cands.size()) + " candidates");
    }
    picked = cands;
  } else {
    std::vector<std::string> headers;
    for (const MethodRecord& m : cands) headers.push_back(m.signature);
    std::unique_ptr<EmbeddingProvider> provider;
    if (ctx.config.embedding) {
      provider = std::make_unique<HttpEmbeddingProvider>(
          ctx.config.embedding->endpoint, ctx.config.embedding->model,
          ctx.config.embedding->auth_env_var);
    } else {
      provider = std::make_unique<TrigramHashProvider>();
    }
    for (std::size_t i : FarthestFirstSelect(EmbedHeaders(headers, *provider), target)) {
      picked.push_back(cands[i]);
    }
  }
  WriteJsonl(RunDir(ctx) / "selected.jsonl", picked);
  spdlog::info("select: {} of {} candidates", picked.size(), cands.size());
}

void RunMutate(WorkflowContext& ctx) {
  const ToolConfig& cfg = ctx.config;
  Corpus corpus = LoadCorpus(cfg);
  Catalog catalog = LoadCatalog(cfg.catalog);
  std::unique_ptr<CompletionClient> client;
  if (cfg.llm_mutation) client = std::make_unique<CompletionClient>(cfg.transport);
  fs::path dir = RunDir(ctx) / "mutants";
  for (const MethodRecord& rec : TaskMethods(ctx)) {
    RequireFileSafe(rec.method_id);
    TaskContext task = TaskFor(corpus, rec.method_id);
    std::vector<Mutant> ms = GenerateOperatorMutants(task.unit, task.method, catalog);
    if (client) {
      auto llm = GenerateLlmMutants(task.unit, task.method,
                                    SelectLlmMutationTargets(task.unit, task.method),
                                    *client);
      ms.insert(ms.end(), llm.begin(), llm.end());
      MarkDuplicates(ms);
    }
    fs::remove_all(dir / rec.method_id);
    for (const Mutant& m : ms) {
      WriteFileAtomic(dir / rec.method_id / (m.mutant_id + ".diff"),
                      MutantDiff(task.unit, m));
    }
    WriteJsonl(dir / (rec.method_id + ".jsonl"), ms);
    spdlog::info("mutate: {}: {} mutants", rec.method_id, ms.size());
  }
}

void RunFilterMutants(WorkflowContext& ctx) {
  const ToolConfig& cfg = ctx.config;
  Corpus corpus = LoadCorpus(cfg);
  fs::path dir = RunDir(ctx);
  std::vector<std::string> viable;
  std::vector<std::string> short_tasks;
  for (const MethodRecord& rec : TaskMethods(ctx)) {
    TaskContext task = TaskFor(corpus, rec.method_id);
    fs::path file = dir / "mutants" / (rec.method_id + ".jsonl");
    std::vector<Mutant> ms = ReadJsonl<Mutant>(file);
    for (Mutant& m : ms) RestoreRenderedText(task.unit, m);
    FilterDefectiveMutants(task, ms, cfg.runner, ctx.workers);
    WriteJsonl(file, ms);
    try {
      WriteInstance(AssembleInstance(task, ms, {}, cfg.runner,
                                     FindAdapter(cfg.adapter).DefaultAllowlist(),
                                     cfg.selection.min_mutants),
                    dir / "instances");
      viable.push_back(rec.method_id);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTooFewMutants) throw;
      spdlog::warn("filter-mutants: {}", e.what());
      short_tasks.push_back(rec.method_id);
    }
  }
  WriteFileAtomic(dir / "tasks.json", StableJson(viable));
  spdlog::info("filter-mutants: {} viable, {} short", viable.size(), short_tasks.size());
  if (!short_tasks.empty() && !ctx.allow_short) {
    std::string list;
    for (const auto& t : short_tasks) list += (list.empty() ? "" : ", ") + t;
    throw Error(ErrorCode::kTooFewMutants,
                list + " (pass --allow-short to drop them and continue)");
  }
}

void RunEvaluate(WorkflowContext& ctx) {
  const ToolConfig& cfg = ctx.config;
  Corpus corpus = LoadCorpus(cfg);
  std::vector<PostconditionSample> samples = LoadSamples(cfg.samples);
  fs::path dir = RunDir(ctx);
  std::string run_id = RunId(ctx);
  std::vector<std::string> viable = ViableTasks(ctx);
  std::set<std::string> viable_set(viable.begin(), viable.end());
  for (const PostconditionSample& s : samples) {
    if (!viable_set.contains(s.task_id)) {
      spdlog::warn("evaluate: sample for unknown or dropped task {} ignored", s.task_id);
    }
  }
  // Records already in the store for this run are kept; a rerun only adds
  // what is missing.
  std::set<std::tuple<std::string, std::string, Setting, int>> have;
  for (const ResultRecord& r : ctx.store.ReadRecords()) {
    if (r.run_id == run_id) have.insert({r.task_id, r.model_tag, r.setting, r.sample_index});
  }
  for (const std::string& task_id : viable) {
    TaskContext task = TaskFor(corpus, task_id);
    std::vector<Mutant> ms = ReadJsonl<Mutant>(dir / "mutants" / (task_id + ".jsonl"));
    std::vector<Mutant> defective;
    for (Mutant& m : ms) {
      if (m.status != MutantStatus::kDefective) continue;
      RestoreRenderedText(task.unit, m);
      defective.push_back(std::move(m));
    }
    std::vector<const PostconditionSample*> mine;
    std::vector<PostconditionSet> sets;
    for (const PostconditionSample& s : samples) {
      if (s.task_id != task_id) continue;
      mine.push_back(&s);
      sets.push_back(s.set);
    }
    if (sets.empty()) {
      spdlog::warn("evaluate: no samples for {}", task_id);
      continue;
    }
    MatrixBuildOptions opt;
    opt.workers = ctx.workers;
    opt.journal = dir / "journal" / (task_id + ".jsonl");
    fs::create_directories(opt.journal->parent_path());
    KillMatrix km = BuildKillMatrix(task, sets, defective, cfg.runner, opt);
    WriteFileAtomic(dir / "matrices" / (task_id + ".json"), StableJson(km));
    std::vector<ValidationVerdict> verdicts = Verdicts(km);
    std::vector<ResultRecord> records;
    for (std::size_t i = 0; i < mine.size(); ++i) {
      const PostconditionSample& s = *mine[i];
      if (have.contains({task_id, s.model_tag, s.setting, s.index})) continue;
      ResultRecord r;
      r.run_id = run_id;
      r.task_id = task_id;
      r.setting = s.setting;
      r.model_tag = s.model_tag;
      r.sample_index = s.index;
      r.correct = verdicts[i].correct;
      r.complete = verdicts[i].complete;
      r.kill_row_ref = "matrices/" + task_id + ".json#" + s.set.set_id;
      records.push_back(std::move(r));
    }
    ctx.store.AppendRecords(records);
    spdlog::info("evaluate: {}: {} sets x {} variants", task_id, km.set_ids.size(),
                 km.variant_ids.size());
  }
}

nlohmann::json RunMetrics(WorkflowContext& ctx) {
  RecordQuery q;
  q.run_id = RunId(ctx);
  std::vector<SampleStats> stats = Aggregate(ctx.store, q);
  json rows = json::array();
  for (const ReportRow& r : BuildReportRows(stats, ctx.config.k_values)) {
    json at = json::object();
    for (int k : ctx.config.k_values) {
      const auto& rho = r.metrics.rho_at.at(k);
      at[std::to_string(k)] = {{"corr", r.metrics.corr_at.at(k)},
                               {"comp", r.metrics.comp_at.at(k)},
                               {"delta", r.metrics.delta_at.at(k)},
                               {"rho", rho ? json(*rho) : json()}};
    }
    rows.push_back({{"model", r.model_tag},
                    {"setting", r.setting},
                    {"tasks", r.tasks},
                    {"at", at},
                    {"c2c", r.metrics.c2c ? json(*r.metrics.c2c) : json()}});
  }
  json fdr = json::object();
  std::vector<KillMatrix> matrices = LoadMatrices(ctx);
  for (const std::string s : {"OPERATOR", "LLM"}) {
    auto v = CrossSchemeFdr(matrices, s);
    fdr[s] = v ? json(*v) : json();
  }
  json out{{"run_id", *ctx.run_id}, {"rows", rows}, {"fdr", fdr}};
  WriteFileAtomic(RunDir(ctx) / "metrics.json", StableJson(out));
  return out;
}

nlohmann::json RunAblate(WorkflowContext& ctx) {
  std::vector<KillMatrix> matrices = LoadMatrices(ctx);
  std::vector<std::string> specs =
      ctx.ablation ? std::vector<std::string>{*ctx.ablation} : ctx.config.ablations;
  auto row_json = [](const AblationRow& r) {
    return json{{"label", r.label},
                {"mean", r.mean},
                {"std", r.std},
                {"trials", r.trials},
                {"per_trial", r.per_trial}};
  };
  json rows = json::array({row_json(BaselineRow(matrices))});
  for (const std::string& s : specs) {
    rows.push_back(row_json(
        RunAblation(matrices, ParseAblationSpec(s, ctx.config.trials), ctx.seed)));
  }
  json out{{"run_id", *ctx.run_id}, {"seed", ctx.seed}, {"rows", rows}};
  WriteFileAtomic(RunDir(ctx) / "ablation.json", StableJson(out));
  return out;
}

fs::path RunReport(WorkflowContext& ctx) {
  RecordQuery q;
  q.run_id = RunId(ctx);
  fs::path dir = EmitReport(ctx.store, *ctx.run_id, Aggregate(ctx.store, q),
                            ctx.config.k_values);
  ctx.store.FinishRun(*ctx.run_id);
  return dir;
}

RepairReport RunRepairEnv(WorkflowContext& ctx) {
  if (!ctx.config.repair) {
    throw Error(ErrorCode::kEmptySelection, "config has no repair section");
  }
  const RepairConfig& rc = *ctx.config.repair;
  CompletionClient client(ctx.config.transport);
  RepairOptions opt;
  opt.max_rounds = rc.max_rounds;
  opt.allowlist = rc.allowlist;
  RepairReport report = EnvironmentRepairLoop(rc.project, rc.check, client, opt);
  if (ctx.run_id || fs::exists(ctx.store.root() / "runs" / "LATEST")) {
    WriteFileAtomic(RunDir(ctx) / "repair.json", StableJson(report));
  }
  return report;
}

}  // namespace mutspec
