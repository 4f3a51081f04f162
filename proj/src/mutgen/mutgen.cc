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

#include "mutspec/mutgen.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <thread>

#include "mutspec/error.h"
#include "mutspec/text.h"

namespace mutspec {
namespace {

bool Parses(const SourceUnit& unit, const std::string& text) {
  try {
    ParseUnit(text, unit.adapter_id, unit.path, unit.unit_id);
    return true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSyntaxError) throw;
    return false;
  }
}

ByteRange LineRange(const std::string& text,
                    const std::vector<std::size_t>& starts, int line) {
  std::size_t begin = starts[line - 1];
  std::size_t end = text.find('\n', begin);
  if (end == std::string::npos) end = text.size();
  return {begin, end};
}

std::string_view Indentation(std::string_view line) {
  std::size_t n = 0;
  while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
  return line.substr(0, n);
}

// First line of the reply that is not blank or a code fence.
std::optional<std::string> ResponseLine(std::string_view response) {
  for (const std::string& raw : SplitLines(response)) {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view t = Trim(line);
    if (t.empty() || t.starts_with("```")) continue;
    return line;
  }
  return std::nullopt;
}

constexpr char kMutationSystemPrompt[] =
    "You inject realistic single-line bugs for mutation testing. Reply with "
    "exactly one line of code and nothing else.";

}  // namespace

std::string_view MutationSchemeName(MutationScheme s) {
  return s == MutationScheme::kOperator ? "OPERATOR" : "LLM";
}

MutationScheme ParseMutationScheme(std::string_view name) {
  if (name == "OPERATOR") return MutationScheme::kOperator;
  if (name == "LLM") return MutationScheme::kLlm;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown mutation scheme " + std::string(name));
}

std::string_view MutantStatusName(MutantStatus s) {
  switch (s) {
    case MutantStatus::kCandidate:
      return "CANDIDATE";
    case MutantStatus::kDefective:
      return "DEFECTIVE";
    case MutantStatus::kDiscardedPasses:
      return "DISCARDED_PASSES";
    case MutantStatus::kDiscardedCrashes:
      return "DISCARDED_CRASHES";
    case MutantStatus::kDiscardedDuplicate:
      return "DISCARDED_DUPLICATE";
  }
  return "CANDIDATE";
}

MutantStatus ParseMutantStatus(std::string_view name) {
  for (auto s : {MutantStatus::kCandidate, MutantStatus::kDefective,
                 MutantStatus::kDiscardedPasses, MutantStatus::kDiscardedCrashes,
                 MutantStatus::kDiscardedDuplicate}) {
    if (MutantStatusName(s) == name) return s;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown mutant status " + std::string(name));
}

std::vector<LabeledSpan> EnumerateSites(const MethodRecord& method,
                                        const MutationOperator& op) {
  std::vector<LabeledSpan> sites;
  for (const LabeledSpan& s : method.spans) {
    if (!op.site_kinds.contains(s.kind)) continue;
    if (!method.body_span.Contains(s.range())) continue;
    if (op.FirstRule(s.payload)) sites.push_back(s);
  }
  std::stable_sort(sites.begin(), sites.end(),
                   [](const LabeledSpan& a, const LabeledSpan& b) {
                     return a.byte_start < b.byte_start;
                   });
  return sites;
}

std::vector<LabeledSpan> EnumerateSites(const MethodRecord& method,
                                        const Catalog& catalog,
                                        std::string_view operator_name) {
  return EnumerateSites(method, FindOperator(catalog, operator_name));
}

Mutant ApplyOperatorMutation(const SourceUnit& unit, const MethodRecord& method,
                             const MutationOperator& op,
                             const LabeledSpan& site) {
  std::optional<std::size_t> rule = op.FirstRule(site.payload);
  if (!rule || !op.site_kinds.contains(site.kind) ||
      unit.text.compare(site.byte_start, site.byte_end - site.byte_start,
                        site.payload) != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                op.name + " does not apply at offset " +
                    std::to_string(site.byte_start));
  }
  Mutant m;
  m.method_id = method.method_id;
  m.scheme = MutationScheme::kOperator;
  m.operator_name = op.name;
  m.span = site.range();
  m.line = site.line;
  m.rule_index = static_cast<int>(*rule);
  m.original_payload = site.payload;
  m.replacement = *op.rules[*rule].Rewrite(site.payload);
  m.rendered_text = ReplaceRange(unit.text, m.span, m.replacement);
  m.mutant_id = method.method_id + ".op." + op.name + "." +
                std::to_string(site.byte_start);
  if (!Parses(unit, m.rendered_text)) {
    throw Error(ErrorCode::kUnparseableResult,
                m.mutant_id + ": '" + m.original_payload + "' -> '" +
                    m.replacement + "'");
  }
  return m;
}

void MarkDuplicates(std::vector<Mutant>& mutants) {
  std::set<std::string_view> seen;
  for (Mutant& m : mutants) {
    if (m.status == MutantStatus::kDiscardedDuplicate) continue;
    if (!seen.insert(m.rendered_text).second) {
      m.status = MutantStatus::kDiscardedDuplicate;
    }
  }
}

std::vector<Mutant> GenerateOperatorMutants(const SourceUnit& unit,
                                            const MethodRecord& method,
                                            const Catalog& catalog) {
  std::vector<const MutationOperator*> ops;
  for (const auto& op : catalog) ops.push_back(&op);
  std::sort(ops.begin(), ops.end(),
            [](auto* a, auto* b) { return a->name < b->name; });
  std::vector<Mutant> mutants;
  for (const MutationOperator* op : ops) {
    for (const LabeledSpan& site : EnumerateSites(method, *op)) {
      try {
        mutants.push_back(ApplyOperatorMutation(unit, method, *op, site));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUnparseableResult) throw;
        spdlog::warn("dropping unparseable mutant {}", e.detail());
      }
    }
  }
  MarkDuplicates(mutants);
  return mutants;
}

std::vector<LlmTarget> SelectLlmMutationTargets(const SourceUnit& unit,
                                                const MethodRecord& method) {
  std::set<int> lines;
  for (const LabeledSpan& s : method.spans) {
    if (s.kind == SpanKind::kCondition || s.kind == SpanKind::kLoopHeader ||
        s.kind == SpanKind::kCall) {
      lines.insert(s.line);
    }
  }
  auto starts = LineStarts(unit.text);
  std::vector<LlmTarget> targets;
  for (int line : lines) {
    ByteRange r = LineRange(unit.text, starts, line);
    LlmTarget t;
    t.line = line;
    t.original_line = unit.text.substr(r.start, r.size());
    t.placeholder_text =
        ReplaceRange(unit.text, r, std::string(kMutationPlaceholder));
    targets.push_back(std::move(t));
  }
  return targets;
}

PromptRequest BuildLlmMutationPrompt(const SourceUnit& unit,
                                     const LlmTarget& target) {
  std::string user =
      "In the " + unit.adapter_id + "-language source below, one line was "
      "replaced by " + std::string(kMutationPlaceholder) + ".\n\n" +
      target.placeholder_text +
      (target.placeholder_text.ends_with('\n') ? "" : "\n") +
      "\nThe original line was:\n" + target.original_line +
      "\n\nWrite a replacement for that line that still compiles but "
      "introduces a behavioral defect. Reply with the single line only.";
  return MakePromptRequest(kMutationSystemPrompt, std::move(user), 400, 0.0);
}

std::vector<Mutant> GenerateLlmMutants(const SourceUnit& unit,
                                       const MethodRecord& method,
                                       const std::vector<LlmTarget>& targets,
                                       CompletionClient& client) {
  const std::size_t n = targets.size();
  std::vector<std::string> responses(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        responses[i] =
            client.CompleteWithRetry(BuildLlmMutationPrompt(unit, targets[i]));
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  {
    std::size_t width = std::min<std::size_t>(
        n, static_cast<std::size_t>(client.config().max_in_flight));
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < width; ++w) pool.emplace_back(worker);
  }

  auto starts = LineStarts(unit.text);
  std::vector<Mutant> mutants;
  for (std::size_t i = 0; i < n; ++i) {
    const LlmTarget& t = targets[i];
    if (failures[i]) {
      try {
        std::rethrow_exception(failures[i]);
      } catch (const Error& e) {
        throw Error(ErrorCode::kClientError, method.method_id + " target line " +
                                                 std::to_string(t.line) + ": " +
                                                 e.what());
      }
    }
    std::optional<std::string> line = ResponseLine(responses[i]);
    if (!line) {
      spdlog::warn("{} line {}: empty response dropped", method.method_id,
                   t.line);
      continue;
    }
    if (Indentation(*line).empty()) {
      *line = std::string(Indentation(t.original_line)) + *line;
    }
    if (Trim(*line) == Trim(t.original_line)) {
      spdlog::warn("{} line {}: response repeats the original line, dropped",
                   method.method_id, t.line);
      continue;
    }
    Mutant m;
    m.method_id = method.method_id;
    m.scheme = MutationScheme::kLlm;
    m.span = LineRange(unit.text, starts, t.line);
    m.line = t.line;
    m.original_payload = t.original_line;
    m.replacement = *line;
    m.rendered_text = ReplaceRange(unit.text, m.span, m.replacement);
    m.mutant_id = method.method_id + ".llm.L" + std::to_string(t.line);
    if (!Parses(unit, m.rendered_text)) {
      spdlog::warn("{}: response does not parse, dropped: {}", m.mutant_id,
                   *line);
      continue;
    }
    mutants.push_back(std::move(m));
  }
  MarkDuplicates(mutants);
  return mutants;
}

void to_json(nlohmann::json& j, const Mutant& m) {
  j = nlohmann::json{
      {"mutant_id", m.mutant_id},
      {"method_id", m.method_id},
      {"scheme", MutationSchemeName(m.scheme)},
      {"operator", m.operator_name ? nlohmann::json(*m.operator_name)
                                   : nlohmann::json()},
      {"span", {m.span.start, m.span.end}},
      {"line", m.line},
      {"rule", m.rule_index},
      {"original", m.original_payload},
      {"replacement", m.replacement},
      {"status", MutantStatusName(m.status)},
  };
}

void from_json(const nlohmann::json& j, Mutant& m) {
  m.mutant_id = j.at("mutant_id").get<std::string>();
  m.method_id = j.at("method_id").get<std::string>();
  m.scheme = ParseMutationScheme(j.at("scheme").get<std::string>());
  if (j.at("operator").is_null()) {
    m.operator_name.reset();
  } else {
    m.operator_name = j.at("operator").get<std::string>();
  }
  m.span = {j.at("span")[0].get<std::size_t>(),
            j.at("span")[1].get<std::size_t>()};
  m.line = j.at("line").get<int>();
  m.rule_index = j.value("rule", -1);
  m.original_payload = j.at("original").get<std::string>();
  m.replacement = j.at("replacement").get<std::string>();
  m.status = ParseMutantStatus(j.at("status").get<std::string>());
  m.rendered_text.clear();
}

void RestoreRenderedText(const SourceUnit& unit, Mutant& m) {
  if (m.span.end > unit.text.size() ||
      unit.text.compare(m.span.start, m.span.size(), m.original_payload) != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                m.mutant_id + " does not match unit " + unit.unit_id);
  }
  m.rendered_text = ReplaceRange(unit.text, m.span, m.replacement);
}

}  // namespace mutspec
