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

#ifndef MUTSPEC_FIXTURE_LANG_H_
#define MUTSPEC_FIXTURE_LANG_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mutspec/error.h"
#include "mutspec/text.h"

// The bundled subject language: a small imperative language with integers,
// booleans, strings, lists, records, functions, if/while/for, return and
// assert. Units hold `fn` declarations and `test` blocks:
//
//   /// Doc comment words...
//   fn clamp(x, lo, hi) {
//     if (x < lo) { return lo; }
//     return x;
//   }
//
//   test clamp_low { assert(clamp(-1, 0, 5) == 0); }
namespace mutspec::fixture {

class SyntaxError : public Error {
 public:
  SyntaxError(int line, const std::string& message)
      : Error(ErrorCode::kSyntaxError,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class ExprKind {
  kInt,
  kString,
  kBool,
  kNull,
  kName,
  kList,
  kRecord,
  kUnary,
  kBinary,
  kTernary,
  kCall,
  kField,
  kIndex,
};

struct Expr {
  ExprKind kind = ExprKind::kNull;
  ByteRange range;
  // Operator token for unary/binary, callee name for calls.
  ByteRange op_range;
  int line = 0;
  // Name, operator, field name, callee, or decoded string value.
  std::string text;
  std::int64_t int_value = 0;
  bool bool_value = false;
  std::vector<std::unique_ptr<Expr>> children;
  // Record literal keys, parallel to children.
  std::vector<std::string> keys;
};
using ExprPtr = std::unique_ptr<Expr>;

enum class StmtKind {
  kLet,
  kAssign,
  kAugAssign,
  kIf,
  kWhile,
  kFor,
  kReturn,
  kBreak,
  kContinue,
  kAssert,
  kExpr,
};

struct Stmt {
  StmtKind kind = StmtKind::kExpr;
  ByteRange range;  // includes the trailing ';' for simple statements
  int line = 0;
  std::string name;  // let / for variable
  std::string op;    // aug-assign operator
  ByteRange op_range;
  ByteRange header_range;  // for-loop header `x in xs`
  ExprPtr target;          // assignment target
  ExprPtr value;           // rhs, condition, iterable, returned value
  std::vector<std::unique_ptr<Stmt>> body;
  std::vector<std::unique_ptr<Stmt>> else_body;
};
using StmtPtr = std::unique_ptr<Stmt>;

struct Function {
  std::string name;
  ByteRange name_range;
  std::vector<std::string> params;
  ByteRange doc_range;        // empty when there is no doc comment
  ByteRange decl_range;       // `fn` through closing brace
  ByteRange signature_range;  // `fn` through closing parenthesis
  ByteRange body_range;       // opening through closing brace
  int line = 0;
  std::vector<StmtPtr> body;
};

struct TestCase {
  std::string name;
  ByteRange range;
  int line = 0;
  std::vector<StmtPtr> body;
};

struct Program {
  std::vector<Function> functions;
  std::vector<TestCase> tests;
};

// Throws SyntaxError.
Program ParseProgram(std::string_view text);
// Parses `text` as exactly one expression. Throws SyntaxError.
ExprPtr ParseExpression(std::string_view text);

// Names resolved by the interpreter without a declaration.
std::span<const std::string_view> BuiltinNames();
bool IsBuiltin(std::string_view name);

// Names the weaver introduces; rejected as user identifiers only by
// convention (the leading double underscore).
inline constexpr std::string_view kGuardBuiltin = "__postcond";
inline constexpr std::string_view kGuardHaltBuiltin = "__postcond_halt";

}  // namespace mutspec::fixture

#endif  // MUTSPEC_FIXTURE_LANG_H_
