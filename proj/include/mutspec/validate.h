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

#ifndef MUTSPEC_VALIDATE_H_
#define MUTSPEC_VALIDATE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mutspec/frontend.h"
#include "mutspec/harness.h"
#include "mutspec/mutgen.h"

namespace mutspec {

// Everything needed to run one method's suite: the unit holding the method
// and the units holding its tests.
struct TaskContext {
  std::string task_id;
  SourceUnit unit;
  MethodRecord method;
  std::vector<SourceUnit> tests;
};

struct ValidationVerdict {
  std::string set_id;
  bool correct = false;
  bool complete = false;
  std::vector<std::string> survived_mutants;
  bool harness_error = false;
};

// True iff the set holds on the original. `harness_error` (optional) is set
// when the outcome is -1.
bool CheckCorrectness(const EvalOutcome& original, bool* harness_error = nullptr);
bool CheckCorrectness(int original_value, bool* harness_error = nullptr);

// row[0] is the original; row[h] for h > 0 the mutants, named by
// variant_ids[h]. Only a value of exactly 0 kills.
ValidationVerdict CheckCompleteness(const std::string& set_id,
                                    const std::vector<int>& row,
                                    const std::vector<std::string>& variant_ids);

struct KillMatrix {
  std::string task_id;
  std::vector<std::string> set_ids;
  std::vector<std::string> variant_ids;  // original first
  // Provenance per variant: scheme name ("" for the original) and operator
  // name ("" when none).
  std::vector<std::string> variant_schemes;
  std::vector<std::string> variant_operators;
  std::vector<std::vector<int>> cells;  // [set][variant]
  // (set index, variant index) of cells that never started.
  std::vector<std::pair<int, int>> harness_errors;
};

inline constexpr std::string_view kOriginalVariantId = "original";

std::vector<ValidationVerdict> Verdicts(const KillMatrix& m);
bool RequireMinMutants(const std::vector<Mutant>& mutants, int min_count = 5);

// The mutant's rendered text re-parsed, with the mutated method located by
// id. Throws kUnparseableResult.
std::pair<SourceUnit, MethodRecord> MaterializeVariant(const TaskContext& task,
                                                       const Mutant& mutant);

struct MatrixBuildOptions {
  int workers = 1;
  // JSONL cell journal; cells already present for this task are reused.
  std::optional<std::filesystem::path> journal;
  // Out: cells actually evaluated by this call.
  int* evaluated = nullptr;
};

// Throws kInvalidArgument when a mutant is not DEFECTIVE. Instrumentation
// errors propagate; a cell whose run cannot start is recorded as -1 with a
// harness error.
KillMatrix BuildKillMatrix(const TaskContext& task,
                           const std::vector<PostconditionSet>& psets,
                           const std::vector<Mutant>& mutants,
                           const RunnerSpec& spec,
                           const MatrixBuildOptions& options = {});

// Plain-runs every CANDIDATE mutant and sets its status: TEST_FAIL keeps it
// (DEFECTIVE), PASS discards it, CRASH and TIMEOUT discard it as crashing.
// Returns the DEFECTIVE ones. Non-candidates are left untouched.
std::vector<Mutant> FilterDefectiveMutants(const TaskContext& task,
                                           std::vector<Mutant>& mutants,
                                           const RunnerSpec& spec,
                                           int workers = 1);

void to_json(nlohmann::json& j, const KillMatrix& m);
void from_json(const nlohmann::json& j, KillMatrix& m);
void to_json(nlohmann::json& j, const ValidationVerdict& v);

// Reads a journal, dropping (and truncating away) a partial trailing line.
std::vector<nlohmann::json> ReadJournal(const std::filesystem::path& path);

}  // namespace mutspec

#endif  // MUTSPEC_VALIDATE_H_
