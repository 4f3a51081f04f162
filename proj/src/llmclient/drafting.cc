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

#include "mutspec/drafting.h"

#include <spdlog/spdlog.h>

#include "mutspec/error.h"
#include "mutspec/text.h"

namespace mutspec {
namespace {

constexpr char kDraftingSystemPrompt[] =
    "You write postconditions for methods. A good postcondition holds for "
    "every correct execution of the method and is violated by the buggy "
    "variants shown. Put each condition in its own fenced code block. Refer "
    "to the return value as `result` and to pre-state values as old(expr), "
    "listing each such expr on a line `old: expr` inside the same block.";

}  // namespace

PromptRequest BuildDraftingPrompt(const SourceUnit& unit,
                                  const MethodRecord& method,
                                  const std::vector<std::string>& mutant_diffs) {
  std::string user = "Method `" + method.name + "` (language: " +
                     unit.adapter_id + "):\n\n" +
                     unit.text.substr(method.decl_span.start,
                                      method.decl_span.size()) +
                     "\n\nFull source file:\n\n" + unit.text;
  if (!unit.text.ends_with('\n')) user += "\n";
  user += "\nDefective variants:\n";
  for (const std::string& d : mutant_diffs) user += "\n" + d;
  user += "\nWrite postconditions for `" + method.name + "`.";
  return MakePromptRequest(kDraftingSystemPrompt, std::move(user), 4000, 0.0);
}

DraftParse ParseDraftResponse(std::string_view response,
                              std::string_view adapter_id,
                              std::string_view set_id) {
  DraftParse out;
  PostconditionSet set;
  set.set_id = std::string(set_id);
  std::vector<std::string> lines = SplitLines(response);
  int block_no = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!Trim(lines[i]).starts_with("```")) continue;
    ++block_no;
    Condition cond;
    std::string expr;
    std::size_t j = i + 1;
    bool closed = false;
    for (; j < lines.size(); ++j) {
      std::string_view t = Trim(lines[j]);
      if (t.starts_with("```")) {
        closed = true;
        break;
      }
      if (t.starts_with("old:")) {
        cond.old_exprs.emplace_back(Trim(t.substr(4)));
      } else if (!t.empty()) {
        if (!expr.empty()) expr += ' ';
        expr += t;
      }
    }
    i = j;
    std::string where = "block " + std::to_string(block_no);
    if (!closed) {
      out.warnings.push_back(where + ": unterminated fence");
      break;
    }
    if (expr.empty()) {
      out.warnings.push_back(where + ": empty");
      continue;
    }
    cond.cond_id = "c" + std::to_string(set.conditions.size() + 1);
    cond.source_text = expr;
    try {
      ValidateCondition(adapter_id, cond);
    } catch (const Error& e) {
      out.warnings.push_back(where + ": " + e.detail());
      continue;
    }
    set.conditions.push_back(std::move(cond));
  }
  if (block_no == 0) out.warnings.push_back("response has no fenced block");
  if (!set.conditions.empty()) out.sets.push_back(std::move(set));
  return out;
}

std::vector<PostconditionSet> DraftPostconditions(
    const SourceUnit& unit, const MethodRecord& method,
    const std::vector<std::string>& mutant_diffs, CompletionClient& client,
    std::string_view set_id) {
  std::string response;
  try {
    response = client.CompleteWithRetry(
        BuildDraftingPrompt(unit, method, mutant_diffs));
  } catch (const Error& e) {
    throw Error(ErrorCode::kClientError,
                "drafting " + method.method_id + ": " + e.what());
  }
  DraftParse parsed = ParseDraftResponse(response, unit.adapter_id, set_id);
  for (const std::string& w : parsed.warnings) {
    spdlog::warn("drafting {}: {}", method.method_id, w);
  }
  return parsed.sets;
}

}  // namespace mutspec
