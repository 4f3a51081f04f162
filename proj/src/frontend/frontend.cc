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

#include "mutspec/frontend.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <mutex>

#include "fixture_adapter.h"
#include "mutspec/error.h"

namespace mutspec {
namespace {

constexpr std::array<std::string_view, 14> kSpanKindNames = {
    "BINARY_OP",   "UNARY_OP",   "NUMERIC_LITERAL", "STRING_LITERAL",
    "BOOLEAN_LITERAL", "RETURN_EXPR", "CONDITION",  "LOOP_HEADER",
    "CALL",        "CALL_ARG",   "AUG_ASSIGN",      "ASSIGN_RHS",
    "VOID_CALL_STMT", "KEYWORD_STMT"};

struct Registry {
  std::mutex mu;
  std::map<std::string, std::unique_ptr<SubjectAdapter>, std::less<>> adapters;
};

Registry& GetRegistry() {
  static Registry* registry = [] {
    auto* r = new Registry;
    auto fixture = std::make_unique<FixtureAdapter>();
    r->adapters.emplace(std::string(fixture->id()), std::move(fixture));
    return r;
  }();
  return *registry;
}

template <typename Int>
bool ParseInt(std::string_view s, Int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string_view SpanKindName(SpanKind kind) {
  return kSpanKindNames[static_cast<std::size_t>(kind)];
}

std::optional<SpanKind> ParseSpanKind(std::string_view name) {
  for (std::size_t i = 0; i < kSpanKindNames.size(); ++i) {
    if (kSpanKindNames[i] == name) return static_cast<SpanKind>(i);
  }
  return std::nullopt;
}

const SubjectAdapter& FindAdapter(std::string_view adapter_id) {
  Registry& r = GetRegistry();
  std::lock_guard lock(r.mu);
  auto it = r.adapters.find(adapter_id);
  if (it == r.adapters.end()) {
    throw Error(ErrorCode::kUnknownAdapter, std::string(adapter_id));
  }
  return *it->second;
}

void RegisterAdapter(std::unique_ptr<SubjectAdapter> adapter) {
  Registry& r = GetRegistry();
  std::lock_guard lock(r.mu);
  std::string id(adapter->id());
  r.adapters[id] = std::move(adapter);
}

SourceUnit ParseUnit(std::string_view text, std::string_view adapter_id,
                     std::string path, std::string unit_id) {
  const SubjectAdapter& adapter = FindAdapter(adapter_id);
  if (!IsValidUtf8(text)) {
    throw Error(ErrorCode::kSyntaxError, "input is not valid UTF-8");
  }
  ParseOutput parsed = adapter.Parse(text);
  SourceUnit unit;
  unit.path = std::move(path);
  if (unit_id.empty()) {
    unit_id = unit.path.empty()
                  ? "unit"
                  : std::filesystem::path(unit.path).stem().string();
  }
  unit.unit_id = std::move(unit_id);
  unit.text = std::string(text);
  unit.adapter_id = std::string(adapter_id);
  unit.spans = std::move(parsed.spans);
  unit.methods = std::move(parsed.methods);
  unit.test_names = std::move(parsed.test_names);
  unit.executable_lines = std::move(parsed.executable_lines);
  for (auto& m : unit.methods) {
    m.unit_id = unit.unit_id;
    m.path = unit.path;
    m.method_id = unit.unit_id + "." + m.name;
  }
  return unit;
}

std::vector<MethodRecord> ExtractMethods(const SourceUnit& unit) {
  std::vector<MethodRecord> records;
  records.reserve(unit.methods.size());
  for (const MethodRecord& structural : unit.methods) {
    MethodRecord m = structural;
    m.cyclomatic = CyclomaticComplexity(m);
    m.comment_words = CommentQuality(m.doc_comment).word_count;
    m.spans.clear();
    for (const LabeledSpan& s : unit.spans) {
      if (m.body_span.Contains(s.range())) m.spans.push_back(s);
    }
    records.push_back(std::move(m));
  }
  return records;
}

int CyclomaticComplexity(const MethodRecord& record) {
  return 1 + record.decision_points;
}

CommentQualityResult CommentQuality(std::string_view comment) {
  CommentQualityResult result;
  std::size_t i = 0;
  while (i < comment.size()) {
    while (i < comment.size() &&
           std::isspace(static_cast<unsigned char>(comment[i]))) {
      ++i;
    }
    bool has_letter = false;
    std::size_t start = i;
    while (i < comment.size() &&
           !std::isspace(static_cast<unsigned char>(comment[i]))) {
      auto c = static_cast<unsigned char>(comment[i]);
      if (c < 0x80 && std::isalpha(c)) has_letter = true;
      ++i;
    }
    if (i > start && has_letter) ++result.word_count;
  }
  result.passes = result.word_count > 15;
  return result;
}

CommentQualityResult CommentQuality(const MethodRecord& record) {
  return CommentQuality(record.doc_comment);
}

CoverageTable ParseCoverageReport(std::string_view text) {
  CoverageTable table;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (line.empty()) continue;
    auto malformed = [&](const std::string& why) {
      return Error(ErrorCode::kMalformedReport,
                   "line " + std::to_string(line_no) + ": " + why);
    };
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos ||
        line.find('\t', t2 + 1) != std::string_view::npos) {
      throw malformed("expected 3 tab-separated fields");
    }
    std::string path(line.substr(0, t1));
    int src_line = 0;
    long long hits = 0;
    if (path.empty()) throw malformed("empty path");
    if (!ParseInt(line.substr(t1 + 1, t2 - t1 - 1), src_line) ||
        src_line < 1) {
      throw malformed("line number must be a positive integer");
    }
    if (!ParseInt(line.substr(t2 + 1), hits) || hits < 0) {
      throw malformed("hit count must be a non-negative integer");
    }
    table.entries[{path, src_line}] += hits;
  }
  return table;
}

std::string RenderCoverageReport(const CoverageTable& table) {
  std::string out;
  for (const auto& [key, hits] : table.entries) {
    out += key.first + "\t" + std::to_string(key.second) + "\t" +
           std::to_string(hits) + "\n";
  }
  return out;
}

std::optional<double> MethodCoverage(const CoverageTable& table,
                                     const MethodRecord& method) {
  auto lo = table.entries.lower_bound({method.path, method.body_first_line});
  auto hi = table.entries.upper_bound({method.path, method.body_last_line});
  int executable = 0;
  int covered = 0;
  for (auto it = lo; it != hi; ++it) {
    ++executable;
    if (it->second > 0) ++covered;
  }
  if (executable == 0) return std::nullopt;
  return static_cast<double>(covered) / executable;
}

std::optional<double> IngestCoverage(const std::filesystem::path& report_file,
                                     const MethodRecord& method) {
  return MethodCoverage(ParseCoverageReport(ReadFile(report_file)), method);
}

std::string_view DependencyClassName(DependencyClass c) {
  return c == DependencyClass::kStandalone ? "STANDALONE" : "DEPENDENT";
}

DependencyClass ClassifyDependency(const MethodRecord& record,
                                   const std::set<std::string>& allowlist) {
  for (const auto& ref : record.external_refs) {
    if (!allowlist.contains(ref)) return DependencyClass::kDependent;
  }
  return DependencyClass::kStandalone;
}

std::string_view LocBucketName(LocBucket b) {
  switch (b) {
    case LocBucket::kShort:
      return "SHORT";
    case LocBucket::kMedium:
      return "MEDIUM";
    case LocBucket::kLong:
      return "LONG";
  }
  return "SHORT";
}

LocBucket BucketByLoc(const MethodRecord& record) {
  if (record.loc < 20) return LocBucket::kShort;
  if (record.loc < 40) return LocBucket::kMedium;
  return LocBucket::kLong;
}

void to_json(nlohmann::json& j, const LabeledSpan& span) {
  j = nlohmann::json{{"kind", SpanKindName(span.kind)},
                     {"start", span.byte_start},
                     {"end", span.byte_end},
                     {"line", span.line},
                     {"payload", span.payload}};
}

void from_json(const nlohmann::json& j, LabeledSpan& span) {
  auto kind = ParseSpanKind(j.at("kind").get<std::string>());
  if (!kind) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown span kind " + j.at("kind").dump());
  }
  span.kind = *kind;
  span.byte_start = j.at("start").get<std::size_t>();
  span.byte_end = j.at("end").get<std::size_t>();
  span.line = j.at("line").get<int>();
  span.payload = j.at("payload").get<std::string>();
}

void to_json(nlohmann::json& j, const MethodRecord& r) {
  j = nlohmann::json{
      {"method_id", r.method_id},
      {"unit_id", r.unit_id},
      {"path", r.path},
      {"name", r.name},
      {"signature", r.signature},
      {"doc_comment", r.doc_comment},
      {"params", r.params},
      {"body_span", {r.body_span.start, r.body_span.end}},
      {"decl_span", {r.decl_span.start, r.decl_span.end}},
      {"first_line", r.first_line},
      {"body_lines", {r.body_first_line, r.body_last_line}},
      {"loc", r.loc},
      {"decision_points", r.decision_points},
      {"cyclomatic", r.cyclomatic},
      {"comment_words", r.comment_words},
      {"coverage", r.coverage ? nlohmann::json(*r.coverage) : nlohmann::json()},
      {"external_refs", r.external_refs},
      {"spans", r.spans},
  };
}

void from_json(const nlohmann::json& j, MethodRecord& r) {
  r.method_id = j.at("method_id").get<std::string>();
  r.unit_id = j.at("unit_id").get<std::string>();
  r.path = j.at("path").get<std::string>();
  r.name = j.at("name").get<std::string>();
  r.signature = j.at("signature").get<std::string>();
  r.doc_comment = j.at("doc_comment").get<std::string>();
  r.params = j.at("params").get<std::vector<std::string>>();
  r.body_span = {j.at("body_span")[0].get<std::size_t>(),
                 j.at("body_span")[1].get<std::size_t>()};
  r.decl_span = {j.at("decl_span")[0].get<std::size_t>(),
                 j.at("decl_span")[1].get<std::size_t>()};
  r.first_line = j.at("first_line").get<int>();
  r.body_first_line = j.at("body_lines")[0].get<int>();
  r.body_last_line = j.at("body_lines")[1].get<int>();
  r.loc = j.at("loc").get<int>();
  r.decision_points = j.at("decision_points").get<int>();
  r.cyclomatic = j.at("cyclomatic").get<int>();
  r.comment_words = j.at("comment_words").get<int>();
  if (j.at("coverage").is_null()) {
    r.coverage.reset();
  } else {
    r.coverage = j.at("coverage").get<double>();
  }
  r.external_refs = j.at("external_refs").get<std::vector<std::string>>();
  r.spans = j.at("spans").get<std::vector<LabeledSpan>>();
}

}  // namespace mutspec
