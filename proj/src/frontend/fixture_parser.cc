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
#include <array>
#include <cctype>
#include <charconv>
#include <optional>

#include "mutspec/fixture_lang.h"

namespace mutspec::fixture {
namespace {

constexpr std::array<std::string_view, 20> kBuiltins = {
    "len",   "push",  "pop",   "abs",   "min",      "max",   "str",
    "upper", "lower", "trim",  "ltrim", "rtrim",    "range", "contains",
    "print", "keys",  "has",   "snapshot", "__postcond", "__postcond_halt"};

constexpr std::array<std::string_view, 15> kKeywords = {
    "fn",     "test",  "let",      "if",     "else",  "while", "for",  "in",
    "return", "break", "continue", "assert", "true",  "false", "null"};

enum class TokKind { kIdent, kKeyword, kInt, kString, kPunct, kEnd };

struct Token {
  TokKind kind = TokKind::kEnd;
  std::string text;  // raw source text of the token
  ByteRange range;
  int line = 0;
};

struct Comment {
  ByteRange range;
  int line = 0;
  bool doc = false;
  bool own_line = false;
};

bool IsKeyword(std::string_view s) {
  return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void Run(std::vector<Token>& tokens, std::vector<Comment>& comments) {
    bool line_has_token = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
        line_has_token = false;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
        continue;
      }
      if (c == '/' && Peek(1) == '/') {
        std::size_t start = pos_;
        bool doc = Peek(2) == '/' && Peek(3) != '/';
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
        comments.push_back({{start, pos_}, line_, doc, !line_has_token});
        continue;
      }
      line_has_token = true;
      std::size_t start = pos_;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_')) {
          ++pos_;
        }
        std::string word(text_.substr(start, pos_ - start));
        TokKind kind = IsKeyword(word) ? TokKind::kKeyword : TokKind::kIdent;
        tokens.push_back({kind, std::move(word), {start, pos_}, line_});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
        if (pos_ < text_.size() &&
            (std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
             text_[pos_] == '_')) {
          throw SyntaxError(line_, "malformed number");
        }
        tokens.push_back({TokKind::kInt,
                          std::string(text_.substr(start, pos_ - start)),
                          {start, pos_},
                          line_});
        continue;
      }
      if (c == '"') {
        ++pos_;
        while (true) {
          if (pos_ >= text_.size() || text_[pos_] == '\n') {
            throw SyntaxError(line_, "unterminated string literal");
          }
          if (text_[pos_] == '\\') {
            if (pos_ + 1 >= text_.size()) {
              throw SyntaxError(line_, "unterminated string literal");
            }
            pos_ += 2;
            continue;
          }
          if (text_[pos_] == '"') {
            ++pos_;
            break;
          }
          ++pos_;
        }
        tokens.push_back({TokKind::kString,
                          std::string(text_.substr(start, pos_ - start)),
                          {start, pos_},
                          line_});
        continue;
      }
      static constexpr std::array<std::string_view, 11> kTwoChar = {
          "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=", "%="};
      std::string_view two = text_.substr(pos_, 2);
      if (std::find(kTwoChar.begin(), kTwoChar.end(), two) != kTwoChar.end()) {
        pos_ += 2;
        tokens.push_back({TokKind::kPunct, std::string(two), {start, pos_},
                          line_});
        continue;
      }
      static constexpr std::string_view kSingle = "+-*/%<>=!(){}[],;.:?";
      if (kSingle.find(c) != std::string_view::npos) {
        ++pos_;
        tokens.push_back({TokKind::kPunct, std::string(1, c), {start, pos_},
                          line_});
        continue;
      }
      throw SyntaxError(line_, std::string("unexpected character '") + c +
                                   "'");
    }
    tokens.push_back({TokKind::kEnd, "", {text_.size(), text_.size()}, line_});
  }

 private:
  char Peek(std::size_t ahead) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

std::string DecodeString(const Token& tok) {
  std::string out;
  std::string_view raw(tok.text);
  raw = raw.substr(1, raw.size() - 2);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '\\') {
      out.push_back(raw[i]);
      continue;
    }
    char e = raw[++i];
    switch (e) {
      case 'n':
        out.push_back('\n');
        break;
      case 't':
        out.push_back('\t');
        break;
      case '"':
        out.push_back('"');
        break;
      case '\\':
        out.push_back('\\');
        break;
      default:
        throw SyntaxError(tok.line, std::string("unknown escape \\") + e);
    }
  }
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, std::vector<Token> tokens,
         std::vector<Comment> comments)
      : text_(text), tokens_(std::move(tokens)), comments_(std::move(comments)) {}

  Program ParseUnit() {
    Program program;
    while (!At(TokKind::kEnd)) {
      if (IsKeywordTok("fn")) {
        program.functions.push_back(ParseFunction());
      } else if (IsKeywordTok("test")) {
        program.tests.push_back(ParseTest());
      } else {
        throw SyntaxError(Cur().line, "expected 'fn' or 'test', found '" +
                                          Cur().text + "'");
      }
    }
    return program;
  }

  ExprPtr ParseStandaloneExpression() {
    ExprPtr e = ParseExpr();
    if (!At(TokKind::kEnd)) {
      throw SyntaxError(Cur().line,
                        "unexpected '" + Cur().text + "' after expression");
    }
    return e;
  }

 private:
  const Token& Cur() const { return tokens_[pos_]; }
  const Token& Prev() const { return tokens_[pos_ - 1]; }
  bool At(TokKind kind) const { return Cur().kind == kind; }
  bool IsPunct(std::string_view p) const {
    return Cur().kind == TokKind::kPunct && Cur().text == p;
  }
  bool IsKeywordTok(std::string_view k) const {
    return Cur().kind == TokKind::kKeyword && Cur().text == k;
  }
  const Token& Advance() { return tokens_[pos_++]; }

  const Token& ExpectPunct(std::string_view p) {
    if (!IsPunct(p)) {
      throw SyntaxError(Cur().line, "expected '" + std::string(p) +
                                        "', found '" + Describe(Cur()) + "'");
    }
    return Advance();
  }
  const Token& ExpectKeyword(std::string_view k) {
    if (!IsKeywordTok(k)) {
      throw SyntaxError(Cur().line, "expected '" + std::string(k) + "'");
    }
    return Advance();
  }
  const Token& ExpectIdent() {
    if (!At(TokKind::kIdent)) {
      throw SyntaxError(Cur().line,
                        "expected identifier, found '" + Describe(Cur()) + "'");
    }
    return Advance();
  }
  static std::string Describe(const Token& t) {
    return t.kind == TokKind::kEnd ? "end of input" : t.text;
  }

  ByteRange DocCommentBefore(int fn_line) const {
    ByteRange doc{0, 0};
    int want = fn_line - 1;
    for (auto it = comments_.rbegin(); it != comments_.rend(); ++it) {
      if (it->line > want) continue;
      if (it->line < want || !it->doc || !it->own_line) break;
      if (doc.size() == 0) doc.end = it->range.end;
      doc.start = it->range.start;
      --want;
    }
    return doc;
  }

  Function ParseFunction() {
    Function fn;
    const Token& kw = ExpectKeyword("fn");
    fn.line = kw.line;
    fn.doc_range = DocCommentBefore(kw.line);
    const Token& name = ExpectIdent();
    fn.name = name.text;
    fn.name_range = name.range;
    ExpectPunct("(");
    if (!IsPunct(")")) {
      while (true) {
        fn.params.push_back(ExpectIdent().text);
        if (IsPunct(",")) {
          Advance();
          continue;
        }
        break;
      }
    }
    const Token& close = ExpectPunct(")");
    fn.signature_range = {kw.range.start, close.range.end};
    std::size_t body_start = Cur().range.start;
    fn.body = ParseBlock();
    fn.body_range = {body_start, Prev().range.end};
    fn.decl_range = {kw.range.start, Prev().range.end};
    return fn;
  }

  TestCase ParseTest() {
    TestCase test;
    const Token& kw = ExpectKeyword("test");
    test.line = kw.line;
    test.name = ExpectIdent().text;
    test.body = ParseBlock();
    test.range = {kw.range.start, Prev().range.end};
    return test;
  }

  std::vector<StmtPtr> ParseBlock() {
    ExpectPunct("{");
    std::vector<StmtPtr> body;
    while (!IsPunct("}")) {
      if (At(TokKind::kEnd)) {
        throw SyntaxError(Cur().line, "unterminated block");
      }
      body.push_back(ParseStatement());
    }
    Advance();
    return body;
  }

  StmtPtr Finish(StmtPtr s, const Token& first) {
    s->range = {first.range.start, Prev().range.end};
    s->line = first.line;
    return s;
  }

  StmtPtr ParseStatement() {
    const Token& first = Cur();
    auto s = std::make_unique<Stmt>();
    if (IsKeywordTok("let")) {
      Advance();
      s->kind = StmtKind::kLet;
      s->name = ExpectIdent().text;
      ExpectPunct("=");
      s->value = ParseExpr();
      ExpectPunct(";");
      return Finish(std::move(s), first);
    }
    if (IsKeywordTok("if")) {
      Advance();
      s->kind = StmtKind::kIf;
      ExpectPunct("(");
      s->value = ParseExpr();
      ExpectPunct(")");
      s->body = ParseBlock();
      if (IsKeywordTok("else")) {
        Advance();
        if (IsKeywordTok("if")) {
          s->else_body.push_back(ParseStatement());
        } else {
          s->else_body = ParseBlock();
        }
      }
      return Finish(std::move(s), first);
    }
    if (IsKeywordTok("while")) {
      Advance();
      s->kind = StmtKind::kWhile;
      ExpectPunct("(");
      s->value = ParseExpr();
      ExpectPunct(")");
      s->body = ParseBlock();
      return Finish(std::move(s), first);
    }
    if (IsKeywordTok("for")) {
      Advance();
      s->kind = StmtKind::kFor;
      ExpectPunct("(");
      const Token& var = ExpectIdent();
      s->name = var.text;
      ExpectKeyword("in");
      s->value = ParseExpr();
      s->header_range = {var.range.start, Prev().range.end};
      ExpectPunct(")");
      s->body = ParseBlock();
      return Finish(std::move(s), first);
    }
    if (IsKeywordTok("return")) {
      Advance();
      s->kind = StmtKind::kReturn;
      if (!IsPunct(";")) s->value = ParseExpr();
      ExpectPunct(";");
      return Finish(std::move(s), first);
    }
    if (IsKeywordTok("break") || IsKeywordTok("continue")) {
      const Token& kw = Advance();
      s->kind = kw.text == "break" ? StmtKind::kBreak : StmtKind::kContinue;
      s->op_range = kw.range;
      ExpectPunct(";");
      return Finish(std::move(s), first);
    }
    if (IsKeywordTok("assert")) {
      Advance();
      s->kind = StmtKind::kAssert;
      ExpectPunct("(");
      s->value = ParseExpr();
      ExpectPunct(")");
      ExpectPunct(";");
      return Finish(std::move(s), first);
    }
    ExprPtr e = ParseExpr();
    if (IsPunct("=")) {
      CheckAssignable(*e);
      Advance();
      s->kind = StmtKind::kAssign;
      s->target = std::move(e);
      s->value = ParseExpr();
      ExpectPunct(";");
      return Finish(std::move(s), first);
    }
    if (IsPunct("+=") || IsPunct("-=") || IsPunct("*=") || IsPunct("/=") ||
        IsPunct("%=")) {
      CheckAssignable(*e);
      const Token& op = Advance();
      s->kind = StmtKind::kAugAssign;
      s->op = op.text;
      s->op_range = op.range;
      s->target = std::move(e);
      s->value = ParseExpr();
      ExpectPunct(";");
      return Finish(std::move(s), first);
    }
    s->kind = StmtKind::kExpr;
    s->value = std::move(e);
    ExpectPunct(";");
    return Finish(std::move(s), first);
  }

  static void CheckAssignable(const Expr& e) {
    if (e.kind != ExprKind::kName && e.kind != ExprKind::kField &&
        e.kind != ExprKind::kIndex) {
      throw SyntaxError(e.line, "invalid assignment target");
    }
  }

  ExprPtr MakeExpr(ExprKind kind, const Token& first) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->line = first.line;
    e->range = first.range;
    return e;
  }

  ExprPtr ParseExpr() { return ParseTernary(); }

  ExprPtr ParseTernary() {
    ExprPtr cond = ParseBinary(0);
    if (!IsPunct("?")) return cond;
    Advance();
    ExprPtr then_e = ParseTernary();
    ExpectPunct(":");
    ExprPtr else_e = ParseTernary();
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::kTernary;
    e->line = cond->line;
    e->range = {cond->range.start, else_e->range.end};
    e->children.push_back(std::move(cond));
    e->children.push_back(std::move(then_e));
    e->children.push_back(std::move(else_e));
    return e;
  }

  static int Precedence(const Token& t) {
    if (t.kind != TokKind::kPunct) return -1;
    const std::string& p = t.text;
    if (p == "||") return 0;
    if (p == "&&") return 1;
    if (p == "==" || p == "!=") return 2;
    if (p == "<" || p == "<=" || p == ">" || p == ">=") return 3;
    if (p == "+" || p == "-") return 4;
    if (p == "*" || p == "/" || p == "%") return 5;
    return -1;
  }

  ExprPtr ParseBinary(int min_prec) {
    ExprPtr lhs = ParseUnary();
    while (true) {
      int prec = Precedence(Cur());
      if (prec < min_prec) return lhs;
      const Token& op = Advance();
      ExprPtr rhs = ParseBinary(prec + 1);
      auto e = std::make_unique<Expr>();
      e->kind = ExprKind::kBinary;
      e->text = op.text;
      e->op_range = op.range;
      e->line = op.line;
      e->range = {lhs->range.start, rhs->range.end};
      e->children.push_back(std::move(lhs));
      e->children.push_back(std::move(rhs));
      lhs = std::move(e);
    }
  }

  ExprPtr ParseUnary() {
    if (IsPunct("-") || IsPunct("!")) {
      const Token& op = Advance();
      ExprPtr operand = ParseUnary();
      auto e = MakeExpr(ExprKind::kUnary, op);
      e->text = op.text;
      e->op_range = op.range;
      e->range = {op.range.start, operand->range.end};
      e->children.push_back(std::move(operand));
      return e;
    }
    return ParsePostfix();
  }

  ExprPtr ParsePostfix() {
    ExprPtr e = ParsePrimary();
    while (true) {
      if (IsPunct(".")) {
        Advance();
        const Token& field = ExpectIdent();
        auto f = std::make_unique<Expr>();
        f->kind = ExprKind::kField;
        f->text = field.text;
        f->line = field.line;
        f->range = {e->range.start, field.range.end};
        f->children.push_back(std::move(e));
        e = std::move(f);
      } else if (IsPunct("[")) {
        Advance();
        ExprPtr index = ParseExpr();
        const Token& close = ExpectPunct("]");
        auto ix = std::make_unique<Expr>();
        ix->kind = ExprKind::kIndex;
        ix->line = e->line;
        ix->range = {e->range.start, close.range.end};
        ix->children.push_back(std::move(e));
        ix->children.push_back(std::move(index));
        e = std::move(ix);
      } else {
        return e;
      }
    }
  }

  ExprPtr ParsePrimary() {
    const Token& t = Cur();
    switch (t.kind) {
      case TokKind::kInt: {
        Advance();
        auto e = MakeExpr(ExprKind::kInt, t);
        auto [ptr, ec] = std::from_chars(t.text.data(),
                                         t.text.data() + t.text.size(),
                                         e->int_value);
        if (ec != std::errc()) {
          throw SyntaxError(t.line, "integer literal out of range");
        }
        return e;
      }
      case TokKind::kString: {
        Advance();
        auto e = MakeExpr(ExprKind::kString, t);
        e->text = DecodeString(t);
        return e;
      }
      case TokKind::kKeyword: {
        if (t.text == "true" || t.text == "false") {
          Advance();
          auto e = MakeExpr(ExprKind::kBool, t);
          e->bool_value = t.text == "true";
          return e;
        }
        if (t.text == "null") {
          Advance();
          return MakeExpr(ExprKind::kNull, t);
        }
        throw SyntaxError(t.line, "unexpected keyword '" + t.text + "'");
      }
      case TokKind::kIdent: {
        Advance();
        if (!IsPunct("(")) {
          auto e = MakeExpr(ExprKind::kName, t);
          e->text = t.text;
          return e;
        }
        Advance();
        auto call = MakeExpr(ExprKind::kCall, t);
        call->text = t.text;
        call->op_range = t.range;
        if (!IsPunct(")")) {
          while (true) {
            call->children.push_back(ParseExpr());
            if (IsPunct(",")) {
              Advance();
              continue;
            }
            break;
          }
        }
        const Token& close = ExpectPunct(")");
        call->range = {t.range.start, close.range.end};
        return call;
      }
      case TokKind::kPunct: {
        if (t.text == "(") {
          Advance();
          ExprPtr inner = ParseExpr();
          const Token& close = ExpectPunct(")");
          // Parentheses are kept in the range so payloads stay verbatim.
          inner->range = {t.range.start, close.range.end};
          return inner;
        }
        if (t.text == "[") {
          Advance();
          auto list = MakeExpr(ExprKind::kList, t);
          if (!IsPunct("]")) {
            while (true) {
              list->children.push_back(ParseExpr());
              if (IsPunct(",")) {
                Advance();
                continue;
              }
              break;
            }
          }
          const Token& close = ExpectPunct("]");
          list->range = {t.range.start, close.range.end};
          return list;
        }
        if (t.text == "{") {
          Advance();
          auto rec = MakeExpr(ExprKind::kRecord, t);
          if (!IsPunct("}")) {
            while (true) {
              rec->keys.push_back(ExpectIdent().text);
              ExpectPunct(":");
              rec->children.push_back(ParseExpr());
              if (IsPunct(",")) {
                Advance();
                continue;
              }
              break;
            }
          }
          const Token& close = ExpectPunct("}");
          rec->range = {t.range.start, close.range.end};
          return rec;
        }
        break;
      }
      case TokKind::kEnd:
        throw SyntaxError(t.line, "unexpected end of input");
    }
    throw SyntaxError(t.line, "unexpected '" + t.text + "'");
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::vector<Comment> comments_;
  std::size_t pos_ = 0;
};

}  // namespace

Program ParseProgram(std::string_view text) {
  std::vector<Token> tokens;
  std::vector<Comment> comments;
  Lexer(text).Run(tokens, comments);
  Parser parser(text, std::move(tokens), std::move(comments));
  return parser.ParseUnit();
}

ExprPtr ParseExpression(std::string_view text) {
  std::vector<Token> tokens;
  std::vector<Comment> comments;
  Lexer(text).Run(tokens, comments);
  Parser parser(text, std::move(tokens), std::move(comments));
  return parser.ParseStandaloneExpression();
}

std::span<const std::string_view> BuiltinNames() { return kBuiltins; }

bool IsBuiltin(std::string_view name) {
  return std::find(kBuiltins.begin(), kBuiltins.end(), name) !=
         kBuiltins.end();
}

}  // namespace mutspec::fixture
