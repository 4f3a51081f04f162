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

#ifndef MUTSPEC_MUTGEN_H_
#define MUTSPEC_MUTGEN_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mutspec/frontend.h"
#include "mutspec/llmclient.h"

namespace mutspec {

// One rewrite: `pattern` (ECMAScript regex) must match the whole payload.
// `replacement` is a regex format string ($1 ...) or one of the integer
// directives @succ / @pred.
struct RewriteRule {
  std::string pattern;
  std::string replacement;
  std::shared_ptr<const std::regex> compiled;

  // nullopt when the pattern does not match or the rewrite is an identity.
  std::optional<std::string> Rewrite(std::string_view payload) const;
};

struct MutationOperator {
  std::string name;
  std::set<SpanKind> site_kinds;
  std::vector<RewriteRule> rules;

  // Index of the first rule producing a non-identity rewrite.
  std::optional<std::size_t> FirstRule(std::string_view payload) const;
};

using Catalog = std::vector<MutationOperator>;

// Throws Error(kInvalidArgument) on schema problems, duplicate names, empty
// or invalid patterns.
Catalog ParseCatalog(const nlohmann::json& doc);
Catalog LoadCatalog(const std::filesystem::path& path);
const MutationOperator& FindOperator(const Catalog& catalog,
                                     std::string_view name);

enum class MutationScheme { kOperator, kLlm };
std::string_view MutationSchemeName(MutationScheme s);
MutationScheme ParseMutationScheme(std::string_view name);

enum class MutantStatus {
  kCandidate,
  kDefective,
  kDiscardedPasses,
  kDiscardedCrashes,
  kDiscardedDuplicate,
};
std::string_view MutantStatusName(MutantStatus s);
MutantStatus ParseMutantStatus(std::string_view name);

struct Mutant {
  std::string mutant_id;
  std::string method_id;
  MutationScheme scheme = MutationScheme::kOperator;
  std::optional<std::string> operator_name;
  ByteRange span;
  int line = 0;
  int rule_index = -1;  // operator mutants only
  std::string original_payload;
  std::string replacement;
  std::string rendered_text;
  MutantStatus status = MutantStatus::kCandidate;
};

// Sites of `op` inside the method, in source order.
std::vector<LabeledSpan> EnumerateSites(const MethodRecord& method,
                                        const MutationOperator& op);
// Looks the operator up by name; throws Error(kUnknownOperator).
std::vector<LabeledSpan> EnumerateSites(const MethodRecord& method,
                                        const Catalog& catalog,
                                        std::string_view operator_name);

// Throws Error(kUnparseableResult) when the rewritten unit no longer parses.
Mutant ApplyOperatorMutation(const SourceUnit& unit, const MethodRecord& method,
                             const MutationOperator& op,
                             const LabeledSpan& site);

// All operators over all sites, ordered by (operator name, byte offset).
// Later mutants whose text equals an earlier one are DISCARDED_DUPLICATE.
std::vector<Mutant> GenerateOperatorMutants(const SourceUnit& unit,
                                            const MethodRecord& method,
                                            const Catalog& catalog);

// Marks every mutant whose rendered text repeats an earlier candidate.
void MarkDuplicates(std::vector<Mutant>& mutants);

inline constexpr std::string_view kMutationPlaceholder = "<<MUTATE_THIS_LINE>>";

struct LlmTarget {
  int line = 0;
  std::string placeholder_text;
  std::string original_line;
};

// One target per body line holding a CONDITION, LOOP_HEADER or CALL span.
std::vector<LlmTarget> SelectLlmMutationTargets(const SourceUnit& unit,
                                                const MethodRecord& method);

PromptRequest BuildLlmMutationPrompt(const SourceUnit& unit,
                                     const LlmTarget& target);

// Prompts once per target (bounded by the client's in-flight limit) and
// keeps responses that differ from the original line and still parse.
// Client failures surface as Error(kClientError) naming the target line.
std::vector<Mutant> GenerateLlmMutants(const SourceUnit& unit,
                                       const MethodRecord& method,
                                       const std::vector<LlmTarget>& targets,
                                       CompletionClient& client);

// Line-based unified diff with `context` lines around each change; empty
// when the texts are equal.
std::string RenderUnifiedDiff(std::string_view before, std::string_view after,
                              std::string_view before_name,
                              std::string_view after_name, int context = 3);
std::string MutantDiff(const SourceUnit& unit, const Mutant& mutant);

// JSON form omits rendered_text; RestoreRenderedText rebuilds it.
void to_json(nlohmann::json& j, const Mutant& m);
void from_json(const nlohmann::json& j, Mutant& m);
void RestoreRenderedText(const SourceUnit& unit, Mutant& m);

}  // namespace mutspec

#endif  // MUTSPEC_MUTGEN_H_
