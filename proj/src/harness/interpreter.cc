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

#include "mutspec/interpreter.h"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>
#include <variant>

#include "mutspec/fixture_lang.h"

namespace mutspec::fixture {
namespace {

struct Value;
using List = std::vector<Value>;
using Record = std::map<std::string, Value, std::less<>>;
using ListPtr = std::shared_ptr<List>;
using RecordPtr = std::shared_ptr<Record>;

struct Value {
  std::variant<std::monostate, std::int64_t, bool, std::string, ListPtr,
               RecordPtr>
      v;

  bool IsNull() const { return v.index() == 0; }
  bool IsInt() const { return v.index() == 1; }
  bool IsBool() const { return v.index() == 2; }
  bool IsString() const { return v.index() == 3; }
  bool IsList() const { return v.index() == 4; }
  bool IsRecord() const { return v.index() == 5; }
  std::int64_t Int() const { return std::get<1>(v); }
  bool Bool() const { return std::get<2>(v); }
  const std::string& Str() const { return std::get<3>(v); }
  const ListPtr& Lst() const { return std::get<4>(v); }
  const RecordPtr& Rec() const { return std::get<5>(v); }
};

Value MakeInt(std::int64_t i) { return Value{i}; }
Value MakeBool(bool b) { return Value{b}; }
Value MakeStr(std::string s) { return Value{std::move(s)}; }
Value MakeList(List l) { return Value{std::make_shared<List>(std::move(l))}; }

std::string_view TypeName(const Value& v) {
  static constexpr std::string_view kNames[] = {"null", "int",  "bool",
                                                "string", "list", "record"};
  return kNames[v.v.index()];
}

bool DeepEqual(const Value& a, const Value& b) {
  if (a.v.index() != b.v.index()) return false;
  switch (a.v.index()) {
    case 0:
      return true;
    case 1:
      return a.Int() == b.Int();
    case 2:
      return a.Bool() == b.Bool();
    case 3:
      return a.Str() == b.Str();
    case 4: {
      const List& x = *a.Lst();
      const List& y = *b.Lst();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!DeepEqual(x[i], y[i])) return false;
      }
      return true;
    }
    default: {
      const Record& x = *a.Rec();
      const Record& y = *b.Rec();
      if (x.size() != y.size()) return false;
      for (auto ix = x.begin(), iy = y.begin(); ix != x.end(); ++ix, ++iy) {
        if (ix->first != iy->first || !DeepEqual(ix->second, iy->second)) {
          return false;
        }
      }
      return true;
    }
  }
}

Value DeepCopy(const Value& v) {
  if (v.IsList()) {
    List copy;
    copy.reserve(v.Lst()->size());
    for (const Value& e : *v.Lst()) copy.push_back(DeepCopy(e));
    return MakeList(std::move(copy));
  }
  if (v.IsRecord()) {
    auto rec = std::make_shared<Record>();
    for (const auto& [k, e] : *v.Rec()) rec->emplace(k, DeepCopy(e));
    return Value{rec};
  }
  return v;
}

std::string Repr(const Value& v, bool quote_strings) {
  switch (v.v.index()) {
    case 0:
      return "null";
    case 1:
      return std::to_string(v.Int());
    case 2:
      return v.Bool() ? "true" : "false";
    case 3:
      return quote_strings ? "\"" + v.Str() + "\"" : v.Str();
    case 4: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.Lst()->size(); ++i) {
        if (i > 0) out += ", ";
        out += Repr((*v.Lst())[i], true);
      }
      return out + "]";
    }
    default: {
      std::string out = "{";
      bool first = true;
      for (const auto& [k, e] : *v.Rec()) {
        if (!first) out += ", ";
        first = false;
        out += k + ": " + Repr(e, true);
      }
      return out + "}";
    }
  }
}

// Control-flow signals. Only RuntimeError and StepExhausted end the run.
struct RuntimeError {
  int line;
  std::string message;
};
struct AssertFailure {
  int line;
  std::string message;
};
struct GuardHalt {};
struct StepExhausted {};

enum class Flow { kNormal, kBreak, kContinue, kReturn };

struct Frame {
  std::unordered_map<std::string, Value> vars;
  std::size_t file = 0;
  Value returned;
  int loop_depth = 0;
};

struct FunctionRef {
  const Function* fn;
  std::size_t file;
};

class Interpreter {
 public:
  Interpreter(const std::vector<Program>& programs, const RunOptions& options,
              RunResult& result)
      : options_(options), result_(result) {
    for (std::size_t i = 0; i < programs.size(); ++i) {
      for (const Function& f : programs[i].functions) {
        if (!functions_.emplace(f.name, FunctionRef{&f, i}).second) {
          throw RuntimeError{f.line, "duplicate function '" + f.name + "'"};
        }
      }
    }
    hits_.resize(programs.size());
    start_ = std::chrono::steady_clock::now();
  }

  // Returns false when the test failed.
  bool RunTest(const TestCase& test, std::size_t file) {
    Frame frame;
    frame.file = file;
    guard_failed_ = false;
    depth_ = 0;
    try {
      ExecBlock(test.body, frame);
    } catch (const AssertFailure& f) {
      result_.out += "FAIL " + test.name + ": line " + std::to_string(f.line) +
                     ": " + f.message + "\n";
      return false;
    } catch (const GuardHalt&) {
      result_.out += "FAIL " + test.name + ": postcondition violated\n";
      return false;
    }
    result_.out += "ok " + test.name + "\n";
    return true;
  }

  const std::vector<std::map<int, long long>>& hits() const { return hits_; }

 private:
  void Tick() {
    ++result_.steps;
    if (options_.max_steps > 0 && result_.steps > options_.max_steps) {
      throw StepExhausted{};
    }
    if (options_.timeout_ms > 0 && (result_.steps & 0xFFF) == 0) {
      auto elapsed = std::chrono::steady_clock::now() - start_;
      if (elapsed > std::chrono::milliseconds(options_.timeout_ms)) {
        throw StepExhausted{};
      }
    }
  }

  Flow ExecBlock(const std::vector<StmtPtr>& body, Frame& frame) {
    for (const StmtPtr& s : body) {
      Flow flow = Exec(*s, frame);
      if (flow != Flow::kNormal) return flow;
    }
    return Flow::kNormal;
  }

  bool Truth(const Expr& e, Frame& frame, std::string_view what) {
    Value v = Eval(e, frame);
    if (!v.IsBool()) {
      throw RuntimeError{e.line, std::string(what) + " must be bool, got " +
                                     std::string(TypeName(v))};
    }
    return v.Bool();
  }

  Flow Exec(const Stmt& s, Frame& frame) {
    Tick();
    if (options_.collect_coverage) ++hits_[frame.file][s.line];
    switch (s.kind) {
      case StmtKind::kLet:
        frame.vars[s.name] = Eval(*s.value, frame);
        return Flow::kNormal;
      case StmtKind::kAssign:
        Store(*s.target, Eval(*s.value, frame), frame);
        return Flow::kNormal;
      case StmtKind::kAugAssign: {
        Value current = Eval(*s.target, frame);
        Value rhs = Eval(*s.value, frame);
        std::string op = s.op.substr(0, 1);
        Store(*s.target, Arith(op, current, rhs, s.line), frame);
        return Flow::kNormal;
      }
      case StmtKind::kIf:
        if (Truth(*s.value, frame, "condition")) {
          return ExecBlock(s.body, frame);
        }
        return ExecBlock(s.else_body, frame);
      case StmtKind::kWhile:
        ++frame.loop_depth;
        while (Truth(*s.value, frame, "condition")) {
          Flow flow = ExecBlock(s.body, frame);
          if (flow == Flow::kBreak) break;
          if (flow == Flow::kReturn) {
            --frame.loop_depth;
            return flow;
          }
          Tick();
        }
        --frame.loop_depth;
        return Flow::kNormal;
      case StmtKind::kFor: {
        List items = Iterable(Eval(*s.value, frame), s.line);
        ++frame.loop_depth;
        for (Value& item : items) {
          frame.vars[s.name] = std::move(item);
          Flow flow = ExecBlock(s.body, frame);
          if (flow == Flow::kBreak) break;
          if (flow == Flow::kReturn) {
            --frame.loop_depth;
            return flow;
          }
        }
        --frame.loop_depth;
        return Flow::kNormal;
      }
      case StmtKind::kReturn:
        frame.returned = s.value ? Eval(*s.value, frame) : Value{};
        return Flow::kReturn;
      case StmtKind::kBreak:
      case StmtKind::kContinue:
        if (frame.loop_depth == 0) {
          throw RuntimeError{s.line, "break or continue outside a loop"};
        }
        return s.kind == StmtKind::kBreak ? Flow::kBreak : Flow::kContinue;
      case StmtKind::kAssert:
        if (!Truth(*s.value, frame, "assertion")) {
          throw AssertFailure{s.line, "assertion failed"};
        }
        return Flow::kNormal;
      case StmtKind::kExpr:
        Eval(*s.value, frame);
        return Flow::kNormal;
    }
    return Flow::kNormal;
  }

  List Iterable(const Value& v, int line) {
    if (v.IsList()) return *v.Lst();
    if (v.IsString()) {
      List chars;
      for (char c : v.Str()) chars.push_back(MakeStr(std::string(1, c)));
      return chars;
    }
    if (v.IsRecord()) {
      List ks;
      for (const auto& [k, e] : *v.Rec()) ks.push_back(MakeStr(k));
      return ks;
    }
    throw RuntimeError{line, "cannot iterate over " + std::string(TypeName(v))};
  }

  void Store(const Expr& target, Value value, Frame& frame) {
    switch (target.kind) {
      case ExprKind::kName: {
        auto it = frame.vars.find(target.text);
        if (it == frame.vars.end()) {
          throw RuntimeError{target.line,
                             "assignment to undeclared '" + target.text + "'"};
        }
        it->second = std::move(value);
        return;
      }
      case ExprKind::kField: {
        Value obj = Eval(*target.children[0], frame);
        if (!obj.IsRecord()) {
          throw RuntimeError{target.line, "field assignment on " +
                                              std::string(TypeName(obj))};
        }
        (*obj.Rec())[target.text] = std::move(value);
        return;
      }
      case ExprKind::kIndex: {
        Value obj = Eval(*target.children[0], frame);
        Value idx = Eval(*target.children[1], frame);
        if (obj.IsList()) {
          (*obj.Lst())[CheckIndex(*obj.Lst(), idx, target.line)] =
              std::move(value);
          return;
        }
        if (obj.IsRecord() && idx.IsString()) {
          (*obj.Rec())[idx.Str()] = std::move(value);
          return;
        }
        throw RuntimeError{target.line, "cannot index-assign into " +
                                            std::string(TypeName(obj))};
      }
      default:
        throw RuntimeError{target.line, "invalid assignment target"};
    }
  }

  std::size_t CheckIndex(const List& list, const Value& idx, int line) {
    if (!idx.IsInt()) throw RuntimeError{line, "list index must be int"};
    if (idx.Int() < 0 || static_cast<std::uint64_t>(idx.Int()) >= list.size()) {
      throw RuntimeError{line, "index " + std::to_string(idx.Int()) +
                                   " out of range for length " +
                                   std::to_string(list.size())};
    }
    return static_cast<std::size_t>(idx.Int());
  }

  Value Arith(const std::string& op, const Value& a, const Value& b, int line) {
    if (op == "+") {
      if (a.IsString() && b.IsString()) return MakeStr(a.Str() + b.Str());
      if (a.IsList() && b.IsList()) {
        List joined = *a.Lst();
        joined.insert(joined.end(), b.Lst()->begin(), b.Lst()->end());
        return MakeList(std::move(joined));
      }
    }
    if (!a.IsInt() || !b.IsInt()) {
      throw RuntimeError{line, "operator " + op + " not defined for " +
                                   std::string(TypeName(a)) + " and " +
                                   std::string(TypeName(b))};
    }
    std::int64_t x = a.Int();
    std::int64_t y = b.Int();
    std::int64_t r = 0;
    bool overflow = false;
    if (op == "+") {
      overflow = __builtin_add_overflow(x, y, &r);
    } else if (op == "-") {
      overflow = __builtin_sub_overflow(x, y, &r);
    } else if (op == "*") {
      overflow = __builtin_mul_overflow(x, y, &r);
    } else if (op == "/" || op == "%") {
      if (y == 0) throw RuntimeError{line, "division by zero"};
      if (x == INT64_MIN && y == -1) {
        overflow = true;
      } else {
        r = op == "/" ? x / y : x % y;
      }
    }
    if (overflow) throw RuntimeError{line, "integer overflow"};
    return MakeInt(r);
  }

  Value Compare(const std::string& op, const Value& a, const Value& b,
                int line) {
    int cmp = 0;
    if (a.IsInt() && b.IsInt()) {
      cmp = a.Int() < b.Int() ? -1 : (a.Int() > b.Int() ? 1 : 0);
    } else if (a.IsString() && b.IsString()) {
      cmp = a.Str().compare(b.Str());
      cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
    } else {
      throw RuntimeError{line, "cannot order " + std::string(TypeName(a)) +
                                   " and " + std::string(TypeName(b))};
    }
    if (op == "<") return MakeBool(cmp < 0);
    if (op == "<=") return MakeBool(cmp <= 0);
    if (op == ">") return MakeBool(cmp > 0);
    return MakeBool(cmp >= 0);
  }

  Value Eval(const Expr& e, Frame& frame) {
    Tick();
    switch (e.kind) {
      case ExprKind::kInt:
        return MakeInt(e.int_value);
      case ExprKind::kString:
        return MakeStr(e.text);
      case ExprKind::kBool:
        return MakeBool(e.bool_value);
      case ExprKind::kNull:
        return Value{};
      case ExprKind::kName: {
        auto it = frame.vars.find(e.text);
        if (it == frame.vars.end()) {
          throw RuntimeError{e.line, "undefined name '" + e.text + "'"};
        }
        return it->second;
      }
      case ExprKind::kList: {
        List items;
        for (const auto& c : e.children) items.push_back(Eval(*c, frame));
        return MakeList(std::move(items));
      }
      case ExprKind::kRecord: {
        auto rec = std::make_shared<Record>();
        for (std::size_t i = 0; i < e.children.size(); ++i) {
          (*rec)[e.keys[i]] = Eval(*e.children[i], frame);
        }
        return Value{rec};
      }
      case ExprKind::kUnary: {
        Value v = Eval(*e.children[0], frame);
        if (e.text == "!") {
          if (!v.IsBool()) throw RuntimeError{e.line, "operand of ! must be bool"};
          return MakeBool(!v.Bool());
        }
        if (!v.IsInt()) throw RuntimeError{e.line, "operand of - must be int"};
        if (v.Int() == INT64_MIN) throw RuntimeError{e.line, "integer overflow"};
        return MakeInt(-v.Int());
      }
      case ExprKind::kBinary:
        return EvalBinary(e, frame);
      case ExprKind::kTernary:
        return Truth(*e.children[0], frame, "condition")
                   ? Eval(*e.children[1], frame)
                   : Eval(*e.children[2], frame);
      case ExprKind::kCall:
        return EvalCall(e, frame);
      case ExprKind::kField: {
        Value obj = Eval(*e.children[0], frame);
        if (!obj.IsRecord()) {
          throw RuntimeError{e.line, "field '" + e.text + "' of " +
                                         std::string(TypeName(obj))};
        }
        auto it = obj.Rec()->find(e.text);
        if (it == obj.Rec()->end()) {
          throw RuntimeError{e.line, "record has no field '" + e.text + "'"};
        }
        return it->second;
      }
      case ExprKind::kIndex: {
        Value obj = Eval(*e.children[0], frame);
        Value idx = Eval(*e.children[1], frame);
        if (obj.IsList()) return (*obj.Lst())[CheckIndex(*obj.Lst(), idx, e.line)];
        if (obj.IsString()) {
          if (!idx.IsInt() || idx.Int() < 0 ||
              static_cast<std::uint64_t>(idx.Int()) >= obj.Str().size()) {
            throw RuntimeError{e.line, "string index out of range"};
          }
          return MakeStr(std::string(1, obj.Str()[idx.Int()]));
        }
        if (obj.IsRecord() && idx.IsString()) {
          auto it = obj.Rec()->find(idx.Str());
          if (it == obj.Rec()->end()) {
            throw RuntimeError{e.line, "record has no field '" + idx.Str() + "'"};
          }
          return it->second;
        }
        throw RuntimeError{e.line, "cannot index " + std::string(TypeName(obj))};
      }
    }
    throw RuntimeError{e.line, "unsupported expression"};
  }

  Value EvalBinary(const Expr& e, Frame& frame) {
    const std::string& op = e.text;
    if (op == "&&" || op == "||") {
      bool lhs = Truth(*e.children[0], frame, "operand of " + op);
      if (op == "&&" && !lhs) return MakeBool(false);
      if (op == "||" && lhs) return MakeBool(true);
      return MakeBool(Truth(*e.children[1], frame, "operand of " + op));
    }
    Value a = Eval(*e.children[0], frame);
    Value b = Eval(*e.children[1], frame);
    if (op == "==") return MakeBool(DeepEqual(a, b));
    if (op == "!=") return MakeBool(!DeepEqual(a, b));
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      return Compare(op, a, b, e.line);
    }
    return Arith(op, a, b, e.line);
  }

  Value EvalCall(const Expr& e, Frame& frame) {
    std::vector<Value> args;
    args.reserve(e.children.size());
    for (const auto& c : e.children) args.push_back(Eval(*c, frame));

    auto fn = functions_.find(e.text);
    if (fn != functions_.end()) {
      const Function& f = *fn->second.fn;
      if (args.size() != f.params.size()) {
        throw RuntimeError{e.line, f.name + " expects " +
                                       std::to_string(f.params.size()) +
                                       " arguments"};
      }
      if (depth_ >= options_.max_call_depth) {
        throw RuntimeError{e.line, "call depth limit exceeded"};
      }
      Frame callee;
      callee.file = fn->second.file;
      for (std::size_t i = 0; i < args.size(); ++i) {
        callee.vars[f.params[i]] = std::move(args[i]);
      }
      ++depth_;
      ExecBlock(f.body, callee);
      --depth_;
      return callee.returned;
    }
    return CallBuiltin(e, args);
  }

  void Arity(const Expr& e, const std::vector<Value>& args, std::size_t lo,
             std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw RuntimeError{e.line, "wrong number of arguments to " + e.text};
    }
  }

  const std::string& StrArg(const Expr& e, const Value& v) {
    if (!v.IsString()) throw RuntimeError{e.line, e.text + " expects a string"};
    return v.Str();
  }

  const ListPtr& ListArg(const Expr& e, const Value& v) {
    if (!v.IsList()) throw RuntimeError{e.line, e.text + " expects a list"};
    return v.Lst();
  }

  std::int64_t IntArg(const Expr& e, const Value& v) {
    if (!v.IsInt()) throw RuntimeError{e.line, e.text + " expects an int"};
    return v.Int();
  }

  Value CallBuiltin(const Expr& e, std::vector<Value>& args) {
    const std::string& name = e.text;
    if (name == "len") {
      Arity(e, args, 1, 1);
      const Value& v = args[0];
      if (v.IsList()) return MakeInt(static_cast<std::int64_t>(v.Lst()->size()));
      if (v.IsString()) return MakeInt(static_cast<std::int64_t>(v.Str().size()));
      if (v.IsRecord()) return MakeInt(static_cast<std::int64_t>(v.Rec()->size()));
      throw RuntimeError{e.line, "len of " + std::string(TypeName(v))};
    }
    if (name == "push") {
      Arity(e, args, 2, 2);
      ListArg(e, args[0])->push_back(std::move(args[1]));
      return Value{};
    }
    if (name == "pop") {
      Arity(e, args, 1, 1);
      const ListPtr& l = ListArg(e, args[0]);
      if (l->empty()) throw RuntimeError{e.line, "pop from empty list"};
      Value last = std::move(l->back());
      l->pop_back();
      return last;
    }
    if (name == "abs") {
      Arity(e, args, 1, 1);
      std::int64_t x = IntArg(e, args[0]);
      if (x == INT64_MIN) throw RuntimeError{e.line, "integer overflow"};
      return MakeInt(x < 0 ? -x : x);
    }
    if (name == "min" || name == "max") {
      Arity(e, args, 1, 64);
      List pool = args.size() == 1 ? *ListArg(e, args[0]) : args;
      if (pool.empty()) throw RuntimeError{e.line, name + " of empty list"};
      std::int64_t best = IntArg(e, pool[0]);
      for (const Value& v : pool) {
        std::int64_t x = IntArg(e, v);
        best = name == "min" ? std::min(best, x) : std::max(best, x);
      }
      return MakeInt(best);
    }
    if (name == "str") {
      Arity(e, args, 1, 1);
      return MakeStr(Repr(args[0], false));
    }
    if (name == "upper" || name == "lower") {
      Arity(e, args, 1, 1);
      std::string s = StrArg(e, args[0]);
      for (char& c : s) {
        c = name == "upper" ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                            : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      return MakeStr(std::move(s));
    }
    if (name == "trim" || name == "ltrim" || name == "rtrim") {
      Arity(e, args, 1, 1);
      std::string_view s = StrArg(e, args[0]);
      auto space = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r';
      };
      if (name != "rtrim") {
        while (!s.empty() && space(s.front())) s.remove_prefix(1);
      }
      if (name != "ltrim") {
        while (!s.empty() && space(s.back())) s.remove_suffix(1);
      }
      return MakeStr(std::string(s));
    }
    if (name == "range") {
      Arity(e, args, 1, 2);
      std::int64_t lo = args.size() == 2 ? IntArg(e, args[0]) : 0;
      std::int64_t hi = IntArg(e, args.back());
      if (hi - lo > 1'000'000) throw RuntimeError{e.line, "range too large"};
      List items;
      for (std::int64_t i = lo; i < hi; ++i) items.push_back(MakeInt(i));
      return MakeList(std::move(items));
    }
    if (name == "contains") {
      Arity(e, args, 2, 2);
      if (args[0].IsString()) {
        return MakeBool(args[0].Str().find(StrArg(e, args[1])) !=
                        std::string::npos);
      }
      for (const Value& v : *ListArg(e, args[0])) {
        if (DeepEqual(v, args[1])) return MakeBool(true);
      }
      return MakeBool(false);
    }
    if (name == "print") {
      std::string line;
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i > 0) line += " ";
        line += Repr(args[i], false);
      }
      result_.out += line + "\n";
      return Value{};
    }
    if (name == "keys") {
      Arity(e, args, 1, 1);
      if (!args[0].IsRecord()) throw RuntimeError{e.line, "keys expects a record"};
      List ks;
      for (const auto& [k, v] : *args[0].Rec()) ks.push_back(MakeStr(k));
      return MakeList(std::move(ks));
    }
    if (name == "has") {
      Arity(e, args, 2, 2);
      if (!args[0].IsRecord()) throw RuntimeError{e.line, "has expects a record"};
      return MakeBool(args[0].Rec()->contains(StrArg(e, args[1])));
    }
    if (name == "snapshot") {
      Arity(e, args, 1, 1);
      return DeepCopy(args[0]);
    }
    if (name == kGuardBuiltin) {
      Arity(e, args, 2, 2);
      if (!args[0].IsBool()) {
        throw RuntimeError{e.line, "postcondition must be bool, got " +
                                       std::string(TypeName(args[0]))};
      }
      if (!args[0].Bool()) {
        result_.err += "POSTCOND_VIOLATION:" + StrArg(e, args[1]) + "\n";
        guard_failed_ = true;
      }
      return Value{};
    }
    if (name == kGuardHaltBuiltin) {
      Arity(e, args, 0, 0);
      if (guard_failed_) throw GuardHalt{};
      return Value{};
    }
    throw RuntimeError{e.line, "undefined function '" + name + "'"};
  }

  const RunOptions& options_;
  RunResult& result_;
  std::map<std::string, FunctionRef, std::less<>> functions_;
  std::vector<std::map<int, long long>> hits_;
  std::chrono::steady_clock::time_point start_;
  int depth_ = 0;
  bool guard_failed_ = false;
};

void FillCoverage(const std::vector<ProgramFile>& files,
                  const std::vector<std::map<int, long long>>& hits,
                  RunResult& result) {
  for (std::size_t i = 0; i < files.size(); ++i) {
    SourceUnit unit = ParseUnit(files[i].text, kFixtureAdapterId, files[i].path);
    for (int line : unit.executable_lines) {
      long long n = 0;
      if (i < hits.size()) {
        auto it = hits[i].find(line);
        if (it != hits[i].end()) n = it->second;
      }
      result.coverage.entries[{files[i].path, line}] = n;
    }
  }
}

}  // namespace

RunResult RunTests(const std::vector<ProgramFile>& files,
                   const RunOptions& options) {
  RunResult result;
  std::vector<Program> programs;
  programs.reserve(files.size());
  try {
    for (const ProgramFile& f : files) programs.push_back(ParseProgram(f.text));
  } catch (const SyntaxError& e) {
    result.exit_code = 2;
    result.err += "error: " + std::string(e.what()) + "\n";
    return result;
  }

  std::unique_ptr<Interpreter> interp;
  try {
    interp = std::make_unique<Interpreter>(programs, options, result);
    for (std::size_t i = 0; i < programs.size(); ++i) {
      for (const TestCase& t : programs[i].tests) {
        ++result.tests_run;
        if (!interp->RunTest(t, i)) ++result.tests_failed;
      }
    }
    result.exit_code = result.tests_failed > 0 ? 1 : 0;
  } catch (const RuntimeError& e) {
    result.exit_code = 2;
    result.err += "runtime error: line " + std::to_string(e.line) + ": " +
                  e.message + "\n";
  } catch (const StepExhausted&) {
    result.timed_out = true;
    result.exit_code = 2;
    result.err += "step budget exhausted\n";
  }
  if (options.collect_coverage) {
    FillCoverage(files, interp ? interp->hits() : decltype(interp->hits()){},
                 result);
  }
  return result;
}

}  // namespace mutspec::fixture
