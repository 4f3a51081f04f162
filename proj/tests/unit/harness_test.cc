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

#include <gtest/gtest.h>

#include <filesystem>

#include "mutspec/error.h"
#include "mutspec/harness.h"
#include "mutspec/interpreter.h"

namespace mutspec {
namespace {

using fixture::ProgramFile;
using fixture::RunTests;

constexpr char kSign[] = R"(/// Returns the sign of x.
fn sign(x) {
  if (x < 0) {
    return -1;
  }
  if (x == 0) {
    return 0;
  }
  return 1;
}
)";

constexpr char kSignTests[] = R"(test neg { assert(sign(-4) == -1); }
test zero { assert(sign(0) == 0); }
test pos { assert(sign(9) == 1); }
)";

constexpr char kSignComplete[] =
    "x < 0 ? result == -1 : (x == 0 ? result == 0 : result == 1)";

SourceUnit Unit(std::string_view text, std::string path) {
  return ParseUnit(text, kFixtureAdapterId, std::move(path));
}

PostconditionSet Set(std::string id, std::vector<Condition> conds) {
  return PostconditionSet{std::move(id), std::move(conds)};
}

std::string Mutate(std::string text, std::string_view from,
                   std::string_view to) {
  auto at = text.find(from);
  EXPECT_NE(at, std::string::npos);
  return text.replace(at, from.size(), to);
}

// --- interpreter -----------------------------------------------------------

fixture::RunResult RunSrc(std::string_view src) {
  return RunTests({ProgramFile{"t.fx", std::string(src)}});
}

TEST(InterpreterTest, PassingSuiteExitsZero) {
  auto r = RunSrc(std::string(kSign) + kSignTests);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.tests_run, 3);
  EXPECT_EQ(r.out, "ok neg\nok zero\nok pos\n");
}

TEST(InterpreterTest, FailedAssertionFailsTestButRunContinues) {
  auto r = RunSrc("test a { assert(1 == 2); }\ntest b { assert(true); }\n");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.tests_failed, 1);
  EXPECT_NE(r.out.find("ok b"), std::string::npos);
}

TEST(InterpreterTest, DivisionByZeroIsRuntimeError) {
  auto r = RunSrc("fn f(x) { return 10 / x; }\ntest t { assert(f(0) == 1); }\n");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("division by zero"), std::string::npos);
}

TEST(InterpreterTest, IntegerOverflowIsRuntimeError) {
  auto r = RunSrc(
      "test t { let x = 9223372036854775807; x += 1; assert(true); }\n");
  EXPECT_EQ(r.exit_code, 2);
}

TEST(InterpreterTest, StepBudgetExhaustionIsTimeout) {
  fixture::RunOptions opt;
  opt.max_steps = 10000;
  auto r = RunTests({{"t.fx", "test t { while (true) { } }\n"}}, opt);
  EXPECT_TRUE(r.timed_out);
}

TEST(InterpreterTest, ValuesAndBuiltins) {
  auto r = RunSrc(R"(
fn build(n) {
  let xs = [];
  for (i in range(n)) {
    if (i % 2 == 0) { continue; }
    push(xs, i * 10);
  }
  return xs;
}
test values {
  let xs = build(6);
  assert(xs == [10, 30, 50]);
  assert(len(xs) == 3 && max(xs) == 50 && min(5, 2, 9) == 2);
  let copy = snapshot(xs);
  push(xs, 70);
  assert(len(copy) == 3 && len(xs) == 4);
  let alias = xs;
  pop(alias);
  assert(len(xs) == 3);
  let r = {name: "  Ada ", tags: ["a"]};
  r.size = 2;
  assert(has(r, "size") && !has(r, "nope"));
  assert(keys(r) == ["name", "size", "tags"]);
  assert(lower(trim(r.name)) == "ada" && upper("x") == "X");
  assert(str(xs) == "[10, 30, 50]" && str(7) == "7");
  assert(contains("hello", "ell") && contains(xs, 30));
  assert(abs(-3) == 3 && -7 / 2 == -3 && -7 % 2 == -1);
  assert((1 < 2 ? "a" : "b") == "a");
  let i = 0;
  while (true) { i += 1; if (i >= 3) { break; } }
  assert(i == 3);
}
)");
  EXPECT_EQ(r.exit_code, 0) << r.out << r.err;
}

TEST(InterpreterTest, AbsentFieldAndUndeclaredAssignmentCrash) {
  EXPECT_EQ(RunSrc("test t { let r = {a: 1}; assert(r.b == 1); }").exit_code, 2);
  EXPECT_EQ(RunSrc("test t { y = 1; }").exit_code, 2);
  EXPECT_EQ(RunSrc("test t { assert(1); }").exit_code, 2);
  EXPECT_EQ(RunSrc("test t { let x = [1][3]; }").exit_code, 2);
}

TEST(InterpreterTest, RecursionDepthIsBounded) {
  auto r = RunSrc("fn f(n) { return f(n + 1); }\ntest t { f(0); }\n");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("depth"), std::string::npos);
}

TEST(InterpreterTest, GuardEmitsMarkerAndHaltsOnlyCurrentTest) {
  auto r = RunSrc(R"(
test a { __postcond(1 == 2, "pc1"); __postcond(false, "pc2"); __postcond_halt(); assert(false); }
test b { __postcond(true, "pc3"); __postcond_halt(); }
)");
  EXPECT_EQ(r.err, "POSTCOND_VIOLATION:pc1\nPOSTCOND_VIOLATION:pc2\n");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.tests_failed, 1);
}

TEST(InterpreterTest, CoverageCountsStatementLines) {
  fixture::RunOptions opt;
  opt.collect_coverage = true;
  auto r = RunTests({{"s.fx", std::string(kSign)},
                     {"s_test.fx", "test t { assert(sign(5) == 1); }\n"}},
                    opt);
  ASSERT_EQ(r.exit_code, 0);
  // Lines 3 and 6 are the if statements, 4 and 7 the early returns.
  auto hits = [&](int line) { return r.coverage.entries.at({"s.fx", line}); };
  EXPECT_EQ(hits(3), 1);
  EXPECT_EQ(hits(4), 0);
  EXPECT_EQ(hits(6), 1);
  EXPECT_EQ(hits(7), 0);
  EXPECT_EQ(hits(9), 1);
  auto method = ExtractMethods(Unit(kSign, "s.fx"))[0];
  EXPECT_DOUBLE_EQ(*MethodCoverage(r.coverage, method), 3.0 / 5.0);
}

// --- protocol --------------------------------------------------------------

TEST(ClassifyRunTest, ProtocolTable) {
  EXPECT_EQ(ClassifyRun(false, 0, "", true).kind, OutcomeKind::kAllPass);
  EXPECT_EQ(ClassifyRun(false, 0, "", true).value, 1);

  auto v = ClassifyRun(false, 1, "noise\nPOSTCOND_VIOLATION:pc3\n", true);
  EXPECT_EQ(v.kind, OutcomeKind::kViolation);
  EXPECT_EQ(v.value, 0);
  EXPECT_EQ(v.violated_cond_ids, std::vector<std::string>{"pc3"});

  auto t = ClassifyRun(true, std::nullopt, "POSTCOND_VIOLATION:pc3\n", true);
  EXPECT_EQ(t.kind, OutcomeKind::kTimeout);
  EXPECT_EQ(t.value, -1);

  EXPECT_EQ(ClassifyRun(false, 1, "", true).kind, OutcomeKind::kTestFail);
  EXPECT_EQ(ClassifyRun(false, 2, "", true).kind, OutcomeKind::kCrash);
  EXPECT_EQ(ClassifyRun(false, std::nullopt, "", true).kind,
            OutcomeKind::kCrash);
}

TEST(ClassifyRunTest, MarkerDominatesCrash) {
  auto o = ClassifyRun(false, 2, "POSTCOND_VIOLATION:a\nboom\n", true);
  EXPECT_EQ(o.value, 0);
}

TEST(ClassifyRunTest, MarkersNeedExactLines) {
  EXPECT_EQ(ClassifyRun(false, 0, " POSTCOND_VIOLATION:a\n", true).value, 1);
  EXPECT_EQ(ClassifyRun(false, 0, "POSTCOND_VIOLATION:a b\n", true).value, 1);
  EXPECT_EQ(ClassifyRun(false, 0, "POSTCOND_VIOLATION:a\n", false).value, 1);
}

TEST(ClassifyRunTest, ViolatedIdsKeepFirstSeenOrder) {
  auto o = ClassifyRun(false, 1,
                       "POSTCOND_VIOLATION:b\nPOSTCOND_VIOLATION:a\n"
                       "POSTCOND_VIOLATION:b\n",
                       true);
  EXPECT_EQ(o.violated_cond_ids, (std::vector<std::string>{"b", "a"}));
}

TEST(ClassifyPlainRunTest, Mapping) {
  EXPECT_EQ(ClassifyPlainRun(ClassifyRun(false, 0, "", false)),
            PlainRunClass::kPass);
  EXPECT_EQ(ClassifyPlainRun(ClassifyRun(false, 1, "", false)),
            PlainRunClass::kTestFail);
  EXPECT_EQ(ClassifyPlainRun(ClassifyRun(false, 2, "", false)),
            PlainRunClass::kCrash);
  EXPECT_EQ(ClassifyPlainRun(ClassifyRun(true, std::nullopt, "", false)),
            PlainRunClass::kTimeout);
}

// --- weaving ---------------------------------------------------------------

class WeaveTest : public ::testing::Test {
 protected:
  SourceUnit unit_ = Unit(kSign, "sign.fx");
  MethodRecord method_ = ExtractMethods(unit_)[0];
};

TEST_F(WeaveTest, EmptySetExpandsPlaceholdersToNothing) {
  SourceUnit woven = Instrument(unit_, method_, Set("empty", {}));
  auto tmpl = FindAdapter(kFixtureAdapterId).WeavingTemplate(unit_, method_);
  ASSERT_TRUE(tmpl);
  std::string expected = *tmpl;
  for (std::string_view slot : {"{{OLD_SNAPSHOTS}}", "{{POSTCONDITIONS}}"}) {
    expected.erase(expected.find(slot), slot.size());
  }
  EXPECT_EQ(woven.text, expected);
  EXPECT_EQ(woven.text.find("__postcond"), std::string::npos);
}

TEST_F(WeaveTest, OneConditionOneGuard) {
  SourceUnit woven =
      Instrument(unit_, method_, Set("s", {{"nonneg", "result >= 0", {}}}));
  const std::string guard = "__postcond(result >= 0, \"nonneg\");";
  auto first = woven.text.find(guard);
  ASSERT_NE(first, std::string::npos);
  EXPECT_EQ(woven.text.find(guard, first + 1), std::string::npos);
  EXPECT_EQ(woven.text.find("__postcond("), first);
}

TEST_F(WeaveTest, OldSnapshotPrecedesBody) {
  SourceUnit woven = Instrument(
      unit_, method_, Set("s", {{"c1", "result >= old(x) - old(x)", {"x"}}}));
  auto snap = woven.text.find("let __old_0 = snapshot(x);");
  auto call = woven.text.find("let result = __impl_sign(x);");
  ASSERT_NE(snap, std::string::npos);
  ASSERT_NE(call, std::string::npos);
  EXPECT_LT(snap, call);
  EXPECT_NE(woven.text.find("result >= __old_0 - __old_0"), std::string::npos);
}

TEST_F(WeaveTest, TextOutsidePlaceholdersIsUntouched) {
  SourceUnit woven =
      Instrument(unit_, method_, Set("s", {{"c", "result == result", {}}}));
  std::string body(unit_.text.substr(method_.body_span.start,
                                     method_.body_span.size()));
  EXPECT_NE(woven.text.find("fn __impl_sign(x) " + body), std::string::npos);
}

TEST_F(WeaveTest, RenderErrors) {
  EXPECT_THROW(
      {
        try {
          Instrument(unit_, method_, Set("s", {{"c", "result >= ", {}}}));
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::kRenderError);
          throw;
        }
      },
      Error);
  auto code = [&](const PostconditionSet& s) {
    try {
      Instrument(unit_, method_, s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kUsage;
  };
  EXPECT_EQ(code(Set("s", {{"bad id", "true", {}}})), ErrorCode::kRenderError);
  EXPECT_EQ(code(Set("s", {{"a", "true", {}}, {"a", "true", {}}})),
            ErrorCode::kRenderError);
  EXPECT_EQ(code(Set("s", {{"a", "old(x) == 1", {}}})),
            ErrorCode::kRenderError);
}

TEST_F(WeaveTest, MissingMethodIsTemplateMissing) {
  MethodRecord ghost = method_;
  ghost.name = "ghost";
  try {
    Instrument(unit_, ghost, Set("s", {}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTemplateMissing);
  }
}

// --- evaluate --------------------------------------------------------------

class EvaluateTest : public WeaveTest {
 protected:
  RunnerSpec spec_;
  std::vector<SourceUnit> tests_{Unit(kSignTests, "sign_test.fx")};
  PostconditionSet complete_ = Set("complete", {{"pc1", kSignComplete, {}}});
};

TEST_F(EvaluateTest, OriginalWithCompleteSetIsOne) {
  EvalOutcome o = Evaluate(unit_, method_, complete_, spec_, tests_);
  EXPECT_EQ(o.value, 1);
  EXPECT_EQ(o.kind, OutcomeKind::kAllPass);
  EXPECT_TRUE(o.violated_cond_ids.empty());
}

TEST_F(EvaluateTest, BoundaryMutantIsKilled) {
  SourceUnit mutant = Unit(Mutate(kSign, "x < 0", "x <= 0"), "sign.fx");
  EvalOutcome o = Evaluate(mutant, method_, complete_, spec_, tests_);
  EXPECT_EQ(o.value, 0);
  EXPECT_EQ(o.violated_cond_ids, std::vector<std::string>{"pc1"});
  EXPECT_EQ(ClassifyPlainRun(RunPlain(mutant, spec_, tests_)),
            PlainRunClass::kTestFail);
}

TEST_F(EvaluateTest, ConditionCrashingOnMutantStateIsMinusOne) {
  PostconditionSet deref = Set("deref", {{"pc1", "result.sign == 1", {}}});
  EvalOutcome o = Evaluate(unit_, method_, deref, spec_, tests_);
  EXPECT_EQ(o.value, -1);
  EXPECT_EQ(o.kind, OutcomeKind::kCrash);
}

TEST_F(EvaluateTest, EmptySetMatchesUnwovenRun) {
  for (std::string text :
       {std::string(kSign), Mutate(kSign, "x < 0", "x <= 0"),
        Mutate(kSign, "return 0;", "return 0 / 0;")}) {
    SourceUnit variant = Unit(text, "sign.fx");
    EvalOutcome woven = Evaluate(variant, method_, Set("e", {}), spec_, tests_);
    EvalOutcome plain = RunPlain(variant, spec_, tests_);
    EXPECT_EQ(woven.kind, plain.kind) << text;
    EXPECT_EQ(woven.value, plain.value);
  }
}

TEST_F(EvaluateTest, BuiltinModeIsDeterministic) {
  PostconditionSet two =
      Set("two", {{"z", "result != 0 || x == 0", {}}, {"a", kSignComplete, {}}});
  SourceUnit mutant = Unit(Mutate(kSign, "return 1;", "return 0;"), "sign.fx");
  EvalOutcome a = Evaluate(mutant, method_, two, spec_, tests_);
  EvalOutcome b = Evaluate(mutant, method_, two, spec_, tests_);
  EXPECT_EQ(a.value, 0);
  EXPECT_EQ(a.violated_cond_ids, (std::vector<std::string>{"z", "a"}));
  EXPECT_EQ(a.violated_cond_ids, b.violated_cond_ids);
  EXPECT_EQ(a.log_excerpt, b.log_excerpt);
}

TEST_F(EvaluateTest, StepBudgetTimeout) {
  RunnerSpec tight = spec_;
  tight.max_steps = 50;
  EvalOutcome o = Evaluate(unit_, method_, complete_, tight, tests_);
  EXPECT_EQ(o.kind, OutcomeKind::kTimeout);
  EXPECT_EQ(o.value, -1);
}

TEST(EvalValueTest, TotalIntoThreeValues) {
  for (bool timed_out : {false, true}) {
    for (std::optional<int> status :
         {std::optional<int>{}, std::optional<int>{0}, std::optional<int>{1},
          std::optional<int>{2}, std::optional<int>{139}}) {
      for (std::string err : {"", "POSTCOND_VIOLATION:x\n", "junk\n"}) {
        auto o = ClassifyRun(timed_out, status, err, true);
        EXPECT_TRUE(o.value == -1 || o.value == 0 || o.value == 1);
        EXPECT_EQ(o.value == 1, o.kind == OutcomeKind::kAllPass);
        EXPECT_EQ(o.value == 0, o.kind == OutcomeKind::kViolation);
        EXPECT_EQ(!o.violated_cond_ids.empty(),
                  o.kind == OutcomeKind::kViolation);
      }
    }
  }
}

// --- process mode ----------------------------------------------------------

class ProcessTest : public EvaluateTest {
 protected:
  void SetUp() override {
    spec_.mode = RunnerMode::kProcess;
    spec_.test_command =
        std::string(MUTSPEC_FIXTURE_RUN) + " sign.fx sign_test.fx";
    spec_.timeout_ms = 20000;
  }
};

TEST_F(ProcessTest, MatchesBuiltinOutcomes) {
  EXPECT_EQ(Evaluate(unit_, method_, complete_, spec_, tests_).value, 1);
  SourceUnit mutant = Unit(Mutate(kSign, "x < 0", "x <= 0"), "sign.fx");
  EvalOutcome o = Evaluate(mutant, method_, complete_, spec_, tests_);
  EXPECT_EQ(o.value, 0);
  EXPECT_EQ(o.violated_cond_ids, std::vector<std::string>{"pc1"});
  EXPECT_EQ(ClassifyPlainRun(RunPlain(mutant, spec_, tests_)),
            PlainRunClass::kTestFail);
}

TEST_F(ProcessTest, WallClockTimeout) {
  spec_.test_command = "sleep 5";
  spec_.timeout_ms = 200;
  EvalOutcome o = RunSuite({unit_}, spec_, true);
  EXPECT_EQ(o.kind, OutcomeKind::kTimeout);
  EXPECT_LT(o.duration_ms, 3000);
}

TEST_F(ProcessTest, SignalIsCrash) {
  spec_.test_command = "kill -SEGV $$";
  EXPECT_EQ(RunSuite({unit_}, spec_, false).kind, OutcomeKind::kCrash);
}

TEST_F(ProcessTest, MissingWorkingDirIsSpawnFailure) {
  spec_.working_dir = "/nonexistent/mutspec";
  try {
    RunSuite({unit_}, spec_, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSpawnFailure);
  }
}

TEST_F(ProcessTest, WorkingDirIsCopiedNotModified) {
  auto dir = std::filesystem::temp_directory_path() / "mutspec-wd-test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  WriteFileAtomic(dir / "marker.txt", "x");
  spec_.working_dir = dir;
  spec_.test_command = "test -f marker.txt && rm marker.txt";
  EXPECT_EQ(RunSuite({unit_}, spec_, false).kind, OutcomeKind::kAllPass);
  EXPECT_TRUE(std::filesystem::exists(dir / "marker.txt"));
  std::filesystem::remove_all(dir);
}

TEST_F(ProcessTest, LogExcerptIsCapped) {
  spec_.test_command = "head -c 200000 /dev/zero | tr '\\0' x";
  EvalOutcome o = RunSuite({unit_}, spec_, false);
  EXPECT_EQ(o.log_excerpt.size(), kLogExcerptCap);
}

}  // namespace
}  // namespace mutspec
