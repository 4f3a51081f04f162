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

#ifndef MUTSPEC_DRAFTING_H_
#define MUTSPEC_DRAFTING_H_

#include <string>
#include <string_view>
#include <vector>

#include "mutspec/frontend.h"
#include "mutspec/harness.h"
#include "mutspec/llmclient.h"

namespace mutspec {

// Asks for postconditions that hold on the method but fail on the given
// mutants. The prompt carries the method, its unit and the diffs only.
PromptRequest BuildDraftingPrompt(const SourceUnit& unit,
                                  const MethodRecord& method,
                                  const std::vector<std::string>& mutant_diffs);

struct DraftParse {
  std::vector<PostconditionSet> sets;  // zero or one set
  std::vector<std::string> warnings;
};

// Every fenced block (``` ... ```) of the reply is one condition. Lines of
// the form `old: <expr>` list pre-state expressions; the remaining lines
// joined by spaces are the condition. Blocks that fail the adapter's syntax
// check are skipped with a warning.
DraftParse ParseDraftResponse(std::string_view response,
                              std::string_view adapter_id,
                              std::string_view set_id);

// Throws Error(kClientError) wrapping transport failures.
std::vector<PostconditionSet> DraftPostconditions(
    const SourceUnit& unit, const MethodRecord& method,
    const std::vector<std::string>& mutant_diffs, CompletionClient& client,
    std::string_view set_id = "draft");

}  // namespace mutspec

#endif  // MUTSPEC_DRAFTING_H_
