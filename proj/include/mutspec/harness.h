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

#ifndef MUTSPEC_HARNESS_H_
#define MUTSPEC_HARNESS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mutspec/frontend.h"

namespace mutspec {

struct Condition {
  std::string cond_id;
  std::string source_text;
  // Expressions captured at method entry; the condition refers to each as
  // `old(<expr>)`.
  std::vector<std::string> old_exprs;
  friend bool operator==(const Condition&, const Condition&) = default;
};

struct PostconditionSet {
  std::string set_id;
  std::vector<Condition> conditions;
  friend bool operator==(const PostconditionSet&,
                         const PostconditionSet&) = default;
};

enum class RunnerMode { kProcess, kBuiltin };

struct RunnerSpec {
  RunnerMode mode = RunnerMode::kBuiltin;
  std::optional<std::string> test_command;  // PROCESS: run via /bin/sh -c
  std::filesystem::path working_dir;  // PROCESS: copied per run
  int timeout_ms = 120000;
  std::map<std::string, std::string> env;
  // BUILTIN: deterministic step budget standing in for wall-clock time.
  long long max_steps = 1'000'000;
};

enum class OutcomeKind { kAllPass, kViolation, kTestFail, kCrash, kTimeout };
std::string_view OutcomeKindName(OutcomeKind kind);
OutcomeKind ParseOutcomeKind(std::string_view name);

struct EvalOutcome {
  int value = -1;
  OutcomeKind kind = OutcomeKind::kCrash;
  std::vector<std::string> violated_cond_ids;
  long long duration_ms = 0;
  std::string log_excerpt;
  bool harness_error = false;  // the run could not be started at all
};

enum class PlainRunClass { kPass, kTestFail, kCrash, kTimeout };
std::string_view PlainRunClassName(PlainRunClass c);

inline constexpr std::string_view kViolationMarker = "POSTCOND_VIOLATION:";
inline constexpr std::size_t kLogExcerptCap = 64 * 1024;

// Cond ids travel inside marker lines and file names.
bool IsValidCondId(std::string_view id);

// Syntax check of one condition after `old(...)` substitution. Throws
// Error(kRenderError).
void ValidateCondition(std::string_view adapter_id, const Condition& cond);

// Weaves `pset` around `method` inside `unit`. Throws kTemplateMissing,
// kRenderError.
SourceUnit Instrument(const SourceUnit& unit, const MethodRecord& method,
                      const PostconditionSet& pset);

// The outcome protocol shared by both runner modes, in priority order:
// deadline, marker (only when contracts are woven), exit 0, exit 1, other.
EvalOutcome ClassifyRun(bool timed_out, std::optional<int> exit_status,
                        std::string_view stderr_text, bool contracts_woven);

// Runs the test blocks found in `units`. Throws kSpawnFailure when a
// PROCESS run cannot start.
EvalOutcome RunSuite(const std::vector<SourceUnit>& units,
                     const RunnerSpec& spec, bool contracts_woven);

// instrument -> run_suite. `support` holds the test units (T).
EvalOutcome Evaluate(const SourceUnit& variant, const MethodRecord& method,
                     const PostconditionSet& pset, const RunnerSpec& spec,
                     const std::vector<SourceUnit>& support);

// For runs with contracts not woven.
PlainRunClass ClassifyPlainRun(const EvalOutcome& outcome);

// Plain run of `variant` with its test units.
EvalOutcome RunPlain(const SourceUnit& variant, const RunnerSpec& spec,
                     const std::vector<SourceUnit>& support);

void to_json(nlohmann::json& j, const Condition& c);
void from_json(const nlohmann::json& j, Condition& c);
void to_json(nlohmann::json& j, const PostconditionSet& s);
void from_json(const nlohmann::json& j, PostconditionSet& s);
void to_json(nlohmann::json& j, const RunnerSpec& s);
void from_json(const nlohmann::json& j, RunnerSpec& s);

}  // namespace mutspec

#endif  // MUTSPEC_HARNESS_H_
