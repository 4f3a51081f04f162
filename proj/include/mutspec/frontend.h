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

#ifndef MUTSPEC_FRONTEND_H_
#define MUTSPEC_FRONTEND_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mutspec/text.h"

namespace mutspec {

enum class SpanKind {
  kBinaryOp,
  kUnaryOp,
  kNumericLiteral,
  kStringLiteral,
  kBooleanLiteral,
  kReturnExpr,
  kCondition,
  kLoopHeader,
  kCall,
  kCallArg,
  kAugAssign,
  kAssignRhs,
  kVoidCallStmt,
  kKeywordStmt,
};

std::string_view SpanKindName(SpanKind kind);
std::optional<SpanKind> ParseSpanKind(std::string_view name);

struct LabeledSpan {
  SpanKind kind = SpanKind::kBinaryOp;
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;
  int line = 0;
  std::string payload;

  ByteRange range() const { return {byte_start, byte_end}; }
  friend bool operator==(const LabeledSpan&, const LabeledSpan&) = default;
};

struct MethodRecord {
  std::string method_id;
  std::string unit_id;
  std::string path;
  std::string name;
  std::string signature;
  std::string doc_comment;
  std::vector<std::string> params;
  ByteRange body_span;
  ByteRange decl_span;
  int first_line = 0;  // line of the declaration keyword
  int body_first_line = 0;
  int body_last_line = 0;
  int loc = 0;
  int decision_points = 0;
  int cyclomatic = 1;
  int comment_words = 0;
  std::optional<double> coverage;
  std::vector<std::string> external_refs;
  std::vector<LabeledSpan> spans;
};

struct SourceUnit {
  std::string unit_id;
  std::string path;
  std::string text;
  std::string adapter_id;
  std::vector<LabeledSpan> spans;
  // Structural method records as produced by the adapter; ExtractMethods
  // completes them with metrics.
  std::vector<MethodRecord> methods;
  std::vector<std::string> test_names;
  std::vector<int> executable_lines;
};

// Everything an adapter learns from one parse.
struct ParseOutput {
  std::vector<LabeledSpan> spans;
  std::vector<MethodRecord> methods;
  std::vector<std::string> test_names;
  std::vector<int> executable_lines;
};

// A subject-language adapter: parsing, span labeling and contract weaving.
class SubjectAdapter {
 public:
  virtual ~SubjectAdapter() = default;

  virtual std::string_view id() const = 0;
  // Throws SyntaxError (ErrorCode::kSyntaxError).
  virtual ParseOutput Parse(std::string_view text) const = 0;
  // Throws Error(kRenderError) when `expr` is not a well-formed boolean
  // expression in this language.
  virtual void CheckExpression(std::string_view expr) const = 0;

  // A copy of the unit text with `{{OLD_SNAPSHOTS}}` and `{{POSTCONDITIONS}}`
  // placed where snapshot captures and guards belong, or nullopt when the
  // adapter cannot weave this method.
  virtual std::optional<std::string> WeavingTemplate(
      const SourceUnit& unit, const MethodRecord& method) const = 0;
  // Placeholder expansions. Each rendered piece ends with a newline.
  virtual std::string RenderSnapshot(std::size_t index,
                                     std::string_view expr) const = 0;
  virtual std::string SnapshotName(std::size_t index) const = 0;
  virtual std::string RenderGuard(std::string_view cond_id,
                                  std::string_view expr) const = 0;
  virtual std::string RenderGuardEpilogue() const = 0;

  virtual std::set<std::string> DefaultAllowlist() const = 0;
};

const SubjectAdapter& FindAdapter(std::string_view adapter_id);
void RegisterAdapter(std::unique_ptr<SubjectAdapter> adapter);
inline constexpr std::string_view kFixtureAdapterId = "fixture";

// Parses `text` with the named adapter. Throws kUnknownAdapter, kSyntaxError.
SourceUnit ParseUnit(std::string_view text, std::string_view adapter_id,
                     std::string path = "", std::string unit_id = "");

// One record per method declaration in source order, metrics filled in
// except coverage.
std::vector<MethodRecord> ExtractMethods(const SourceUnit& unit);

int CyclomaticComplexity(const MethodRecord& record);

struct CommentQualityResult {
  int word_count = 0;
  bool passes = false;
};
CommentQualityResult CommentQuality(std::string_view comment);
CommentQualityResult CommentQuality(const MethodRecord& record);

struct CoverageTable {
  // (path, line) -> hits. Every key is an executable line.
  std::map<std::pair<std::string, int>, long long> entries;
};

// Tab-separated `path<TAB>line<TAB>hits` records. Throws
// Error(kMalformedReport) naming the offending line.
CoverageTable ParseCoverageReport(std::string_view text);
std::string RenderCoverageReport(const CoverageTable& table);

// Covered executable lines / executable lines within the method body;
// nullopt when no executable line maps into the body.
std::optional<double> MethodCoverage(const CoverageTable& table,
                                     const MethodRecord& method);
std::optional<double> IngestCoverage(const std::filesystem::path& report_file,
                                     const MethodRecord& method);

enum class DependencyClass { kStandalone, kDependent };
std::string_view DependencyClassName(DependencyClass c);
DependencyClass ClassifyDependency(const MethodRecord& record,
                                   const std::set<std::string>& allowlist);

enum class LocBucket { kShort, kMedium, kLong };
std::string_view LocBucketName(LocBucket b);
// [0,20) short, [20,40) medium, [40,inf) long.
LocBucket BucketByLoc(const MethodRecord& record);

void to_json(nlohmann::json& j, const LabeledSpan& span);
void from_json(const nlohmann::json& j, LabeledSpan& span);
void to_json(nlohmann::json& j, const MethodRecord& record);
void from_json(const nlohmann::json& j, MethodRecord& record);

}  // namespace mutspec

#endif  // MUTSPEC_FRONTEND_H_
