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

#include "mutspec/harness.h"

#include <algorithm>
#include <chrono>
#include <regex>

#include "mutspec/error.h"
#include "mutspec/interpreter.h"
#include "mutspec/text.h"
#include "mutspec/process.h"

namespace mutspec {
namespace {

constexpr std::string_view kSnapshotsSlot = "{{OLD_SNAPSHOTS}}";
constexpr std::string_view kGuardsSlot = "{{POSTCONDITIONS}}";

std::string FillSlot(std::string text, std::string_view slot,
                     std::string_view expansion) {
  std::size_t at = text.find(slot);
  if (at == std::string::npos || text.find(slot, at + 1) != std::string::npos) {
    throw Error(ErrorCode::kTemplateMissing,
                "template must contain " + std::string(slot) + " exactly once");
  }
  text.replace(at, slot.size(), expansion);
  return text;
}

// Replaces every `old(<expr>)` whose argument is textually `expr`.
std::string SubstituteOld(std::string text, const std::string& expr,
                          const std::string& name) {
  const std::string needle = "old(" + expr + ")";
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    bool word_start =
        pos == 0 || !(std::isalnum(static_cast<unsigned char>(text[pos - 1])) ||
                      text[pos - 1] == '_');
    if (word_start) {
      text.replace(pos, needle.size(), name);
      pos += name.size();
    } else {
      pos += needle.size();
    }
  }
  return text;
}

// Condition text with every listed `old(...)` replaced by its snapshot
// variable; validated against the adapter grammar.
std::string RenderConditionExpr(const SubjectAdapter& adapter,
                                const Condition& c,
                                const std::vector<std::string>& olds) {
  static const std::regex kStrayOld(R"((^|[^A-Za-z0-9_])old\s*\()");
  if (!IsValidCondId(c.cond_id)) {
    throw Error(ErrorCode::kRenderError,
                "invalid condition id '" + c.cond_id + "'");
  }
  std::string expr = c.source_text;
  for (std::size_t i = 0; i < olds.size(); ++i) {
    expr = SubstituteOld(expr, olds[i], adapter.SnapshotName(i));
  }
  if (std::regex_search(expr, kStrayOld)) {
    throw Error(ErrorCode::kRenderError,
                c.cond_id + ": old(...) argument not listed in old_exprs");
  }
  try {
    adapter.CheckExpression(expr);
  } catch (const Error& e) {
    throw Error(ErrorCode::kRenderError, c.cond_id + ": " + e.detail());
  }
  return expr;
}

std::string UnitFileName(const SourceUnit& unit) {
  return unit.path.empty() ? unit.unit_id + ".fx" : unit.path;
}

std::string CapLog(std::string log) {
  if (log.size() > kLogExcerptCap) log.resize(kLogExcerptCap);
  return log;
}

}  // namespace

std::string_view OutcomeKindName(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::kAllPass:
      return "ALL_PASS";
    case OutcomeKind::kViolation:
      return "VIOLATION";
    case OutcomeKind::kTestFail:
      return "TEST_FAIL";
    case OutcomeKind::kCrash:
      return "CRASH";
    case OutcomeKind::kTimeout:
      return "TIMEOUT";
  }
  return "CRASH";
}

OutcomeKind ParseOutcomeKind(std::string_view name) {
  for (OutcomeKind k : {OutcomeKind::kAllPass, OutcomeKind::kViolation,
                        OutcomeKind::kTestFail, OutcomeKind::kCrash,
                        OutcomeKind::kTimeout}) {
    if (OutcomeKindName(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown outcome kind " + std::string(name));
}

std::string_view PlainRunClassName(PlainRunClass c) {
  switch (c) {
    case PlainRunClass::kPass:
      return "PASS";
    case PlainRunClass::kTestFail:
      return "TEST_FAIL";
    case PlainRunClass::kCrash:
      return "CRASH";
    case PlainRunClass::kTimeout:
      return "TIMEOUT";
  }
  return "CRASH";
}

bool IsValidCondId(std::string_view id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '.' || c == '-';
  });
}

void ValidateCondition(std::string_view adapter_id, const Condition& cond) {
  const SubjectAdapter& adapter = FindAdapter(adapter_id);
  for (const std::string& e : cond.old_exprs) {
    try {
      adapter.CheckExpression(e);
    } catch (const Error& err) {
      throw Error(ErrorCode::kRenderError,
                  "old expression '" + e + "': " + err.detail());
    }
  }
  RenderConditionExpr(adapter, cond, cond.old_exprs);
}

SourceUnit Instrument(const SourceUnit& unit, const MethodRecord& method,
                      const PostconditionSet& pset) {
  const SubjectAdapter& adapter = FindAdapter(unit.adapter_id);
  std::optional<std::string> tmpl = adapter.WeavingTemplate(unit, method);
  if (!tmpl) {
    throw Error(ErrorCode::kTemplateMissing,
                "no weaving template for " + method.method_id);
  }

  // Distinct pre-state expressions in order of first mention.
  std::vector<std::string> olds;
  for (const Condition& c : pset.conditions) {
    for (const std::string& e : c.old_exprs) {
      if (std::find(olds.begin(), olds.end(), e) == olds.end()) {
        olds.push_back(e);
      }
    }
  }
  std::string snapshots;
  for (std::size_t i = 0; i < olds.size(); ++i) {
    try {
      adapter.CheckExpression(olds[i]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kRenderError,
                  pset.set_id + ": old expression '" + olds[i] + "': " +
                      e.detail());
    }
    snapshots += adapter.RenderSnapshot(i, olds[i]);
  }

  std::string guards;
  std::vector<std::string> seen_ids;
  for (const Condition& c : pset.conditions) {
    if (std::find(seen_ids.begin(), seen_ids.end(), c.cond_id) !=
        seen_ids.end()) {
      throw Error(ErrorCode::kRenderError,
                  pset.set_id + ": duplicate condition id " + c.cond_id);
    }
    seen_ids.push_back(c.cond_id);
    guards += adapter.RenderGuard(c.cond_id, RenderConditionExpr(adapter, c, olds));
  }
  if (!pset.conditions.empty()) guards += adapter.RenderGuardEpilogue();

  std::string woven = FillSlot(*tmpl, kSnapshotsSlot, snapshots);
  woven = FillSlot(std::move(woven), kGuardsSlot, guards);
  try {
    return ParseUnit(woven, unit.adapter_id, unit.path, unit.unit_id);
  } catch (const Error& e) {
    throw Error(ErrorCode::kRenderError,
                "woven unit does not parse: " + e.detail());
  }
}

EvalOutcome ClassifyRun(bool timed_out, std::optional<int> exit_status,
                        std::string_view stderr_text, bool contracts_woven) {
  EvalOutcome o;
  if (timed_out) {
    o.kind = OutcomeKind::kTimeout;
    o.value = -1;
    return o;
  }
  if (contracts_woven) {
    for (const std::string& line : SplitLines(stderr_text)) {
      std::string_view l = line;
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      if (!l.starts_with(kViolationMarker)) continue;
      std::string id(l.substr(kViolationMarker.size()));
      if (!IsValidCondId(id)) continue;
      if (std::find(o.violated_cond_ids.begin(), o.violated_cond_ids.end(),
                    id) == o.violated_cond_ids.end()) {
        o.violated_cond_ids.push_back(std::move(id));
      }
    }
    if (!o.violated_cond_ids.empty()) {
      o.kind = OutcomeKind::kViolation;
      o.value = 0;
      return o;
    }
  }
  if (exit_status && *exit_status == 0) {
    o.kind = OutcomeKind::kAllPass;
    o.value = 1;
  } else if (exit_status && *exit_status == 1) {
    o.kind = OutcomeKind::kTestFail;
    o.value = -1;
  } else {
    o.kind = OutcomeKind::kCrash;
    o.value = -1;
  }
  return o;
}

EvalOutcome RunSuite(const std::vector<SourceUnit>& units,
                     const RunnerSpec& spec, bool contracts_woven) {
  if (spec.timeout_ms <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "timeout_ms must be positive");
  }
  if (spec.mode == RunnerMode::kBuiltin) {
    auto start = std::chrono::steady_clock::now();
    std::vector<fixture::ProgramFile> files;
    for (const SourceUnit& u : units) {
      if (u.adapter_id != kFixtureAdapterId) {
        throw Error(ErrorCode::kUnknownAdapter,
                    "builtin runner only executes fixture units, got " +
                        u.adapter_id);
      }
      files.push_back({UnitFileName(u), u.text});
    }
    fixture::RunOptions options;
    options.max_steps = spec.max_steps;
    options.timeout_ms = spec.timeout_ms;
    fixture::RunResult run = fixture::RunTests(files, options);
    EvalOutcome o = ClassifyRun(run.timed_out, run.exit_code, run.err,
                                contracts_woven);
    o.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    o.log_excerpt = CapLog(run.out + run.err);
    return o;
  }

  if (!spec.test_command || spec.test_command->empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "PROCESS runner requires a test command");
  }
  TempDir sandbox("mutspec-run");
  if (!spec.working_dir.empty()) {
    std::error_code ec;
    if (!std::filesystem::is_directory(spec.working_dir)) {
      throw Error(ErrorCode::kSpawnFailure,
                  "working directory " + spec.working_dir.string() +
                      " does not exist");
    }
    std::filesystem::copy(spec.working_dir, sandbox.path(),
                          std::filesystem::copy_options::recursive, ec);
    if (ec) {
      throw Error(ErrorCode::kSpawnFailure,
                  "cannot copy working directory: " + ec.message());
    }
  }
  for (const SourceUnit& u : units) {
    std::filesystem::path dest = sandbox.path() / UnitFileName(u);
    std::filesystem::create_directories(dest.parent_path());
    WriteFileAtomic(dest, u.text);
  }
  ProcessResult run =
      RunProcess(*spec.test_command, sandbox.path(), spec.env, spec.timeout_ms);
  EvalOutcome o =
      ClassifyRun(run.timed_out, run.exit_status, run.err, contracts_woven);
  o.duration_ms = run.duration_ms;
  o.log_excerpt = CapLog(run.out + run.err);
  return o;
}

EvalOutcome Evaluate(const SourceUnit& variant, const MethodRecord& method,
                     const PostconditionSet& pset, const RunnerSpec& spec,
                     const std::vector<SourceUnit>& support) {
  std::vector<SourceUnit> units{Instrument(variant, method, pset)};
  units.insert(units.end(), support.begin(), support.end());
  return RunSuite(units, spec, /*contracts_woven=*/true);
}

PlainRunClass ClassifyPlainRun(const EvalOutcome& outcome) {
  switch (outcome.kind) {
    case OutcomeKind::kAllPass:
      return PlainRunClass::kPass;
    case OutcomeKind::kTestFail:
      return PlainRunClass::kTestFail;
    case OutcomeKind::kTimeout:
      return PlainRunClass::kTimeout;
    case OutcomeKind::kViolation:
    case OutcomeKind::kCrash:
      return PlainRunClass::kCrash;
  }
  return PlainRunClass::kCrash;
}

EvalOutcome RunPlain(const SourceUnit& variant, const RunnerSpec& spec,
                     const std::vector<SourceUnit>& support) {
  std::vector<SourceUnit> units{variant};
  units.insert(units.end(), support.begin(), support.end());
  return RunSuite(units, spec, /*contracts_woven=*/false);
}

void to_json(nlohmann::json& j, const Condition& c) {
  j = nlohmann::json{{"id", c.cond_id},
                     {"expr", c.source_text},
                     {"old", c.old_exprs}};
}

void from_json(const nlohmann::json& j, Condition& c) {
  c.cond_id = j.at("id").get<std::string>();
  c.source_text = j.at("expr").get<std::string>();
  c.old_exprs = j.value("old", std::vector<std::string>{});
}

void to_json(nlohmann::json& j, const PostconditionSet& s) {
  j = nlohmann::json{{"set_id", s.set_id}, {"conditions", s.conditions}};
}

void from_json(const nlohmann::json& j, PostconditionSet& s) {
  s.set_id = j.at("set_id").get<std::string>();
  s.conditions = j.at("conditions").get<std::vector<Condition>>();
}

void to_json(nlohmann::json& j, const RunnerSpec& s) {
  j = nlohmann::json{
      {"mode", s.mode == RunnerMode::kBuiltin ? "BUILTIN" : "PROCESS"},
      {"test_command", s.test_command ? nlohmann::json(*s.test_command)
                                      : nlohmann::json()},
      {"working_dir", s.working_dir.generic_string()},
      {"timeout_ms", s.timeout_ms},
      {"env", s.env},
      {"max_steps", s.max_steps}};
}

void from_json(const nlohmann::json& j, RunnerSpec& s) {
  std::string mode = j.value("mode", "BUILTIN");
  if (mode == "BUILTIN") {
    s.mode = RunnerMode::kBuiltin;
  } else if (mode == "PROCESS") {
    s.mode = RunnerMode::kProcess;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown runner mode " + mode);
  }
  if (j.contains("test_command") && !j.at("test_command").is_null()) {
    s.test_command = j.at("test_command").get<std::string>();
  }
  s.working_dir = j.value("working_dir", std::string());
  s.timeout_ms = j.value("timeout_ms", 120000);
  s.env = j.value("env", std::map<std::string, std::string>{});
  s.max_steps = j.value("max_steps", 1'000'000LL);
  if (s.timeout_ms <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "timeout_ms must be positive");
  }
  if (s.mode == RunnerMode::kProcess && !s.test_command) {
    throw Error(ErrorCode::kInvalidArgument,
                "PROCESS runner requires test_command");
  }
}

}  // namespace mutspec
