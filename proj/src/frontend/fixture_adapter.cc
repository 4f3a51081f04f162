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

#include <algorithm>
#include <set>

#include "fixture_adapter.h"
#include "mutspec/fixture_lang.h"

namespace mutspec {
namespace {

using fixture::Expr;
using fixture::ExprKind;
using fixture::Stmt;
using fixture::StmtKind;

class SpanCollector {
 public:
  SpanCollector(std::string_view text, const std::vector<std::size_t>& starts)
      : text_(text), starts_(starts) {}

  void Add(SpanKind kind, ByteRange range) {
    if (range.size() == 0) return;
    LabeledSpan span;
    span.kind = kind;
    span.byte_start = range.start;
    span.byte_end = range.end;
    span.line = LineOfOffset(starts_, range.start);
    span.payload = std::string(text_.substr(range.start, range.size()));
    spans_.push_back(std::move(span));
  }

  void VisitExpr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::kBinary:
        Add(SpanKind::kBinaryOp, e.op_range);
        break;
      case ExprKind::kUnary:
        Add(SpanKind::kUnaryOp, e.op_range);
        break;
      case ExprKind::kInt:
        Add(SpanKind::kNumericLiteral, e.range);
        break;
      case ExprKind::kString:
        Add(SpanKind::kStringLiteral, e.range);
        break;
      case ExprKind::kBool:
        Add(SpanKind::kBooleanLiteral, e.range);
        break;
      case ExprKind::kCall: {
        Add(SpanKind::kCall, e.op_range);
        std::size_t n = e.children.size();
        if (n >= 2) {
          // The last argument together with its leading separator. Nested
          // calls inside an already-labeled argument are skipped so spans of
          // this kind never overlap.
          ByteRange last{e.children[n - 2]->range.end,
                         e.children[n - 1]->range.end};
          bool overlaps = std::any_of(
              arg_ranges_.begin(), arg_ranges_.end(),
              [&](const ByteRange& r) { return r.Overlaps(last); });
          if (!overlaps) {
            arg_ranges_.push_back(last);
            Add(SpanKind::kCallArg, last);
          }
        }
        break;
      }
      default:
        break;
    }
    for (const auto& child : e.children) VisitExpr(*child);
  }

  void VisitStmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::kLet:
      case StmtKind::kAssign:
        Add(SpanKind::kAssignRhs, s.value->range);
        break;
      case StmtKind::kAugAssign:
        Add(SpanKind::kAugAssign, s.op_range);
        break;
      case StmtKind::kIf:
      case StmtKind::kWhile:
        Add(SpanKind::kCondition, s.value->range);
        break;
      case StmtKind::kFor:
        Add(SpanKind::kLoopHeader, s.header_range);
        break;
      case StmtKind::kReturn:
        if (s.value) Add(SpanKind::kReturnExpr, s.value->range);
        break;
      case StmtKind::kBreak:
      case StmtKind::kContinue:
        Add(SpanKind::kKeywordStmt, s.op_range);
        break;
      case StmtKind::kExpr:
        if (s.value->kind == ExprKind::kCall) {
          Add(SpanKind::kVoidCallStmt, s.range);
        }
        break;
      case StmtKind::kAssert:
        break;
    }
    if (s.target) VisitExpr(*s.target);
    if (s.value) VisitExpr(*s.value);
    for (const auto& b : s.body) VisitStmt(*b);
    for (const auto& b : s.else_body) VisitStmt(*b);
  }

  std::vector<LabeledSpan> Take() {
    std::stable_sort(spans_.begin(), spans_.end(),
                     [](const LabeledSpan& a, const LabeledSpan& b) {
                       if (a.byte_start != b.byte_start) {
                         return a.byte_start < b.byte_start;
                       }
                       return a.kind < b.kind;
                     });
    return std::move(spans_);
  }

 private:
  std::string_view text_;
  const std::vector<std::size_t>& starts_;
  std::vector<LabeledSpan> spans_;
  std::vector<ByteRange> arg_ranges_;
};

// Free names and callees plus McCabe decision points of one function body.
class BodyAnalyzer {
 public:
  explicit BodyAnalyzer(const fixture::Function& fn) : self_(fn.name) {
    bound_.insert(fn.params.begin(), fn.params.end());
    for (const auto& s : fn.body) CollectBindings(*s);
    for (const auto& s : fn.body) VisitStmt(*s);
  }

  std::vector<std::string> external_refs() const {
    return {refs_.begin(), refs_.end()};
  }
  int decision_points() const { return decisions_; }

 private:
  void CollectBindings(const Stmt& s) {
    if (s.kind == StmtKind::kLet || s.kind == StmtKind::kFor) {
      bound_.insert(s.name);
    }
    for (const auto& b : s.body) CollectBindings(*b);
    for (const auto& b : s.else_body) CollectBindings(*b);
  }

  void VisitStmt(const Stmt& s) {
    if (s.kind == StmtKind::kIf || s.kind == StmtKind::kWhile ||
        s.kind == StmtKind::kFor) {
      ++decisions_;
    }
    if (s.target) VisitExpr(*s.target);
    if (s.value) VisitExpr(*s.value);
    for (const auto& b : s.body) VisitStmt(*b);
    for (const auto& b : s.else_body) VisitStmt(*b);
  }

  void VisitExpr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::kName:
        if (!bound_.contains(e.text)) refs_.insert(e.text);
        break;
      case ExprKind::kCall:
        if (e.text != self_) refs_.insert(e.text);
        break;
      case ExprKind::kTernary:
        ++decisions_;
        break;
      case ExprKind::kBinary:
        if (e.text == "&&" || e.text == "||") ++decisions_;
        break;
      default:
        break;
    }
    for (const auto& c : e.children) VisitExpr(*c);
  }

  std::string self_;
  std::set<std::string> bound_;
  std::set<std::string> refs_;
  int decisions_ = 0;
};

void CollectStatementLines(const std::vector<fixture::StmtPtr>& body,
                           std::set<int>& lines) {
  for (const auto& s : body) {
    lines.insert(s->line);
    CollectStatementLines(s->body, lines);
    CollectStatementLines(s->else_body, lines);
  }
}

}  // namespace

int CountBodyLoc(std::string_view text, ByteRange body) {
  auto starts = LineStarts(text);
  int first = LineOfOffset(starts, body.start);
  int last = LineOfOffset(starts, body.end > body.start ? body.end - 1 : 0);
  int loc = 0;
  for (int line = first; line <= last; ++line) {
    std::size_t ls = starts[line - 1];
    std::size_t le = line < static_cast<int>(starts.size())
                         ? starts[line] - 1
                         : text.size();
    std::size_t b = std::max(ls, body.start);
    std::size_t e = std::min(le, body.end);
    if (b >= e) continue;
    std::string_view slice = text.substr(b, e - b);
    if (b == body.start && !slice.empty() && slice.front() == '{') {
      slice.remove_prefix(1);
    }
    if (e == body.end && !slice.empty() && slice.back() == '}') {
      slice.remove_suffix(1);
    }
    slice = Trim(slice);
    if (slice.empty() || slice.starts_with("//")) continue;
    ++loc;
  }
  return loc;
}

std::string_view FixtureAdapter::id() const { return kFixtureAdapterId; }

ParseOutput FixtureAdapter::Parse(std::string_view text) const {
  fixture::Program program = fixture::ParseProgram(text);
  auto starts = LineStarts(text);
  ParseOutput out;

  SpanCollector spans(text, starts);
  std::set<int> exec_lines;
  for (const auto& fn : program.functions) {
    for (const auto& s : fn.body) spans.VisitStmt(*s);
    CollectStatementLines(fn.body, exec_lines);
  }
  for (const auto& test : program.tests) {
    for (const auto& s : test.body) spans.VisitStmt(*s);
    CollectStatementLines(test.body, exec_lines);
    out.test_names.push_back(test.name);
  }
  out.spans = spans.Take();
  out.executable_lines.assign(exec_lines.begin(), exec_lines.end());

  for (const auto& fn : program.functions) {
    MethodRecord m;
    m.name = fn.name;
    m.params = fn.params;
    m.signature = std::string(
        text.substr(fn.signature_range.start, fn.signature_range.size()));
    if (fn.doc_range.size() > 0) {
      m.doc_comment =
          std::string(text.substr(fn.doc_range.start, fn.doc_range.size()));
    }
    m.body_span = fn.body_range;
    m.decl_span = fn.decl_range;
    m.first_line = fn.line;
    m.body_first_line = LineOfOffset(starts, fn.body_range.start);
    m.body_last_line = LineOfOffset(starts, fn.body_range.end - 1);
    m.loc = CountBodyLoc(text, fn.body_range);
    BodyAnalyzer analyzer(fn);
    m.external_refs = analyzer.external_refs();
    m.decision_points = analyzer.decision_points();
    out.methods.push_back(std::move(m));
  }
  return out;
}

void FixtureAdapter::CheckExpression(std::string_view expr) const {
  try {
    fixture::ParseExpression(expr);
  } catch (const fixture::SyntaxError& e) {
    throw Error(ErrorCode::kRenderError,
                "'" + std::string(expr) + "': " + e.detail());
  }
}

std::optional<std::string> FixtureAdapter::WeavingTemplate(
    const SourceUnit& unit, const MethodRecord& method) const {
  fixture::Program program = fixture::ParseProgram(unit.text);
  const fixture::Function* fn = nullptr;
  for (const auto& f : program.functions) {
    if (f.name == method.name) fn = &f;
  }
  if (fn == nullptr) return std::nullopt;

  std::string args;
  for (std::size_t i = 0; i < fn->params.size(); ++i) {
    if (i > 0) args += ", ";
    args += fn->params[i];
  }
  const std::string impl_name = std::string(kImplPrefix) + fn->name;
  std::string wrapper = "fn " + fn->name + "(" + args + ") {\n" +
                        "{{OLD_SNAPSHOTS}}" + "  let result = " + impl_name +
                        "(" + args + ");\n" + "{{POSTCONDITIONS}}" +
                        "  return result;\n}\n\n";

  std::size_t anchor =
      fn->doc_range.size() > 0 ? fn->doc_range.start : fn->decl_range.start;
  auto starts = LineStarts(unit.text);
  anchor = starts[LineOfOffset(starts, anchor) - 1];

  std::string out;
  out.append(unit.text, 0, anchor);
  out.append(wrapper);
  out.append(unit.text, anchor, fn->name_range.start - anchor);
  out.append(impl_name);
  out.append(unit.text, fn->name_range.end);
  return out;
}

std::string FixtureAdapter::RenderSnapshot(std::size_t index,
                                           std::string_view expr) const {
  return "  let " + SnapshotName(index) + " = snapshot(" + std::string(expr) +
         ");\n";
}

std::string FixtureAdapter::SnapshotName(std::size_t index) const {
  return "__old_" + std::to_string(index);
}

std::string FixtureAdapter::RenderGuard(std::string_view cond_id,
                                        std::string_view expr) const {
  return "  " + std::string(fixture::kGuardBuiltin) + "(" + std::string(expr) +
         ", \"" + std::string(cond_id) + "\");\n";
}

std::string FixtureAdapter::RenderGuardEpilogue() const {
  return "  " + std::string(fixture::kGuardHaltBuiltin) + "();\n";
}

std::set<std::string> FixtureAdapter::DefaultAllowlist() const {
  std::set<std::string> names;
  for (std::string_view b : fixture::BuiltinNames()) {
    if (!b.starts_with("__")) names.emplace(b);
  }
  return names;
}

}  // namespace mutspec
