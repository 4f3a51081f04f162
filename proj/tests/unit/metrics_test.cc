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

#include <cmath>
#include <random>

#include "mutspec/error.h"
#include "mutspec/metrics.h"

namespace mutspec {
namespace {

// Brute force over every k-subset of n samples of which the first c succeed.
double BrutePassAtK(int n, int c, int k) {
  long long hit = 0, total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    ++total;
    if (mask & ((1u << c) - 1)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(total);
}

TEST(PassAtKTest, Examples) {
  EXPECT_EQ(PassAtK(5, 0, 3), 0.0);
  EXPECT_NEAR(PassAtK(5, 2, 1), 0.4, 1e-15);
  EXPECT_NEAR(PassAtK(5, 2, 3), 0.9, 1e-15);
}

TEST(PassAtKTest, EqualsBruteForceUpToEight) {
  for (int n = 1; n <= 8; ++n) {
    for (int c = 0; c <= n; ++c) {
      for (int k = 1; k <= n; ++k) {
        EXPECT_NEAR(PassAtK(n, c, k), BrutePassAtK(n, c, k), 1e-12)
            << n << " " << c << " " << k;
      }
    }
  }
}

TEST(PassAtKTest, Shape) {
  for (int n = 1; n <= 64; ++n) {
    for (int c = 0; c <= n; ++c) {
      EXPECT_NEAR(PassAtK(n, c, 1), static_cast<double>(c) / n, 1e-12);
      if (c >= 1) {
        EXPECT_EQ(PassAtK(n, c, n), 1.0);
      }
      for (int k = 1; k <= n; ++k) {
        double v = PassAtK(n, c, k);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        if (k > 1) {
          EXPECT_GE(v, PassAtK(n, c, k - 1));
        }
        if (c > 0) {
          EXPECT_GE(v, PassAtK(n, c - 1, k));
        }
      }
    }
  }
}

TEST(PassAtKTest, Errors) {
  try {
    PassAtK(3, 1, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kKExceedsN);
  }
  EXPECT_THROW(PassAtK(3, 4, 1), Error);
  EXPECT_THROW(PassAtK(3, 1, 0), Error);
}

SampleStats Stats(std::string id, int n, int corr, int comp) {
  std::vector<SampleOutcome> s(n);
  for (int i = 0; i < corr; ++i) s[i].correct = true;
  for (int i = 0; i < comp; ++i) s[i].complete = true;
  return MakeSampleStats(std::move(id), std::move(s));
}

TEST(CorrCompTest, Examples) {
  auto cc = CorrCompAtK({Stats("a", 5, 5, 0), Stats("b", 5, 0, 0)}, 1);
  EXPECT_DOUBLE_EQ(cc.corr, 0.5);
  for (int k : {1, 3, 5}) {
    EXPECT_EQ(CorrCompAtK({Stats("a", 5, 3, 0), Stats("b", 5, 1, 0)}, k).comp,
              0.0);
  }
  EXPECT_NEAR(CorrCompAtK({Stats("a", 5, 2, 0)}, 3).corr, 0.9, 1e-15);
  try {
    CorrCompAtK({Stats("a", 5, 2, 0), Stats("short", 2, 1, 0)}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kKExceedsN);
    EXPECT_NE(e.detail().find("short"), std::string::npos);
  }
  EXPECT_THROW(MakeSampleStats("x", {{false, true}}), Error);
}

TEST(CorrCompTest, CorrDominatesComp) {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<SampleStats> stats;
    int tasks = 1 + static_cast<int>(rng() % 6);
    for (int t = 0; t < tasks; ++t) {
      int n = 5 + static_cast<int>(rng() % 4);
      int corr = static_cast<int>(rng() % (n + 1));
      int comp = static_cast<int>(rng() % (corr + 1));
      stats.push_back(Stats("t" + std::to_string(t), n, corr, comp));
    }
    for (int k : {1, 3, 5}) {
      auto cc = CorrCompAtK(stats, k);
      EXPECT_GE(cc.corr, cc.comp);
    }
  }
}

TEST(GapTest, Examples) {
  Gap g = GapMetrics(0.118, 0.055);
  EXPECT_NEAR(g.delta, 0.063, 1e-12);
  EXPECT_NEAR(*g.rho, 0.466, 0.0005);
  EXPECT_NEAR(*GapMetrics(0.629, 0.207).rho, 0.329, 0.0005);
  g = GapMetrics(0, 0);
  EXPECT_EQ(g.delta, 0);
  EXPECT_FALSE(g.rho);
}

TEST(C2cTest, Examples) {
  EXPECT_DOUBLE_EQ(*C2cRatio({Stats("a", 8, 6, 2), Stats("b", 8, 6, 1)}), 0.25);
  EXPECT_DOUBLE_EQ(*C2cRatio({Stats("a", 5, 3, 3)}), 1.0);
  EXPECT_FALSE(C2cRatio({Stats("a", 5, 0, 0)}));
  EXPECT_FALSE(C2cRatio({}));
}

TEST(MethodGapTest, Examples) {
  EXPECT_DOUBLE_EQ(*MethodLevelGap(Stats("a", 5, 4, 1)), 0.6);
  EXPECT_FALSE(MethodLevelGap(Stats("a", 5, 0, 0)));
  EXPECT_EQ(*MethodLevelGap(Stats("a", 5, 5, 5)), 0.0);
}

KillMatrix Matrix(std::string task, std::vector<std::string> schemes,
                  std::vector<std::string> ops,
                  std::vector<std::vector<int>> cells) {
  KillMatrix m;
  m.task_id = std::move(task);
  for (std::size_t j = 0; j < schemes.size(); ++j) {
    m.variant_ids.push_back(j ? m.task_id + ".m" + std::to_string(j)
                              : "original");
  }
  m.variant_schemes = std::move(schemes);
  m.variant_operators = std::move(ops);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    m.set_ids.push_back("s" + std::to_string(i));
  }
  m.cells = std::move(cells);
  return m;
}

KillMatrix FdrMatrix() {
  std::vector<std::vector<int>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({1, 0, 0, i < 2 ? 1 : 0});
  rows.push_back({1, 1, 0, 0});
  rows.push_back({0, 0, 0, 0});
  return Matrix("f", {"", "OPERATOR", "OPERATOR", "LLM"}, {"", "math", "math", ""},
                rows);
}

TEST(FdrTest, KnownCounts) {
  EXPECT_DOUBLE_EQ(*CrossSchemeFdr({FdrMatrix()}, "OPERATOR"), 0.2);
  std::map<std::string, std::string> scheme_of = {
      {"f.m1", "OPERATOR"}, {"f.m2", "OPERATOR"}, {"f.m3", "LLM"}};
  EXPECT_DOUBLE_EQ(*CrossSchemeFdr(FdrMatrix(), scheme_of, "OPERATOR"), 0.2);
}

TEST(FdrTest, AllKillOtherSchemeIsZero) {
  KillMatrix m = FdrMatrix();
  for (auto& row : m.cells) row[3] = row[0] == 1 ? 0 : row[3];
  EXPECT_EQ(*CrossSchemeFdr({m}, "OPERATOR"), 0.0);
}

TEST(FdrTest, DegenerateCasesAreUndefined) {
  EXPECT_FALSE(CrossSchemeFdr(std::vector<KillMatrix>{}, "OPERATOR"));
  KillMatrix only_op =
      Matrix("o", {"", "OPERATOR"}, {"", "math"}, {{1, 0}, {1, 1}});
  EXPECT_FALSE(CrossSchemeFdr({only_op}, "OPERATOR"));
  EXPECT_FALSE(CrossSchemeFdr({only_op}, "LLM"));
  KillMatrix none_complete = FdrMatrix();
  for (auto& row : none_complete.cells) row[1] = 1;
  EXPECT_FALSE(CrossSchemeFdr({none_complete}, "OPERATOR"));
  KillMatrix no_rows = Matrix("e", {"", "OPERATOR", "LLM"}, {"", "m", ""}, {});
  EXPECT_FALSE(CrossSchemeFdr({no_rows}, "OPERATOR"));
}

// Hand-built matrices for the exclusion variants.
//   A: original, math (OPERATOR), one LLM mutant; 4 sets.
//   B: original, math, negate_conditionals; 2 sets.
// Baseline Comp@1: A 1/4, B 1/2 -> 3/8.
std::vector<KillMatrix> Synthetic() {
  return {
      Matrix("A", {"", "OPERATOR", "LLM"}, {"", "math", ""},
             {{1, 0, 1}, {1, 0, 0}, {1, 1, 1}, {0, 0, 0}}),
      Matrix("B", {"", "OPERATOR", "OPERATOR"},
             {"", "math", "negate_conditionals"}, {{1, 0, 1}, {1, 0, 0}}),
  };
}

TEST(AblationTest, HandComputedMeans) {
  auto ms = Synthetic();
  EXPECT_EQ(BaselineRow(ms).mean, 0.375);
  auto run = [&](const std::string& s) {
    AblationRow r = RunAblation(ms, ParseAblationSpec(s), 1);
    EXPECT_EQ(r.std, 0.0);
    EXPECT_EQ(r.trials, 1);
    EXPECT_EQ(r.label, s);
    return r.mean;
  };
  EXPECT_EQ(run("SCHEME_EXCLUDE(LLM)"), 0.5);
  EXPECT_EQ(run("SCHEME_EXCLUDE(OPERATOR)"), 0.625);
  EXPECT_EQ(run("OPERATOR_EXCLUDE(math)"), 0.375);
  EXPECT_EQ(run("OPERATOR_EXCLUDE(negate_conditionals)"), 0.625);
}

TEST(AblationTest, Errors) {
  auto ms = Synthetic();
  auto code = [&](const std::string& s) {
    try {
      RunAblation(ms, ParseAblationSpec(s, 3), 1);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kUsage;  // no error
  };
  EXPECT_EQ(code("OPERATOR_EXCLUDE(nope)"), ErrorCode::kUnknownOperator);
  EXPECT_EQ(code("BUDGET(0)"), ErrorCode::kFractionOutOfRange);
  EXPECT_EQ(code("BUDGET(1.5)"), ErrorCode::kFractionOutOfRange);
  EXPECT_EQ(code("RANDOM_LLM_REMOVAL(-0.1)"), ErrorCode::kFractionOutOfRange);
  EXPECT_EQ(code("RANDOM_OPERATOR_REMOVAL(3)"), ErrorCode::kFractionOutOfRange);
  EXPECT_EQ(code("RANDOM_OPERATOR_REMOVAL(2)"), ErrorCode::kUsage);
  EXPECT_THROW(ParseAblationSpec("BUDGET"), Error);
  EXPECT_THROW(ParseAblationSpec("BUDGET(x)"), Error);
  EXPECT_THROW(ParseAblationSpec("SHRINK(0.5)"), Error);
}

// Row r leaves only mutant r+1 alive, so with s of 5 mutants kept exactly
// 5 - s rows are complete whatever the draw.
KillMatrix OneSurvivorEach() {
  std::vector<std::vector<int>> rows;
  for (int r = 0; r < 5; ++r) {
    std::vector<int> row(6, 0);
    row[0] = 1;
    row[r + 1] = 1;
    rows.push_back(row);
  }
  return Matrix("S", {"", "OPERATOR", "OPERATOR", "OPERATOR", "LLM", "LLM"},
                {"", "a", "b", "c", "", ""}, rows);
}

TEST(AblationTest, BudgetSizes) {
  std::vector<KillMatrix> ms = {OneSurvivorEach()};
  auto mean = [&](const char* s) {
    AblationRow r = RunAblation(ms, ParseAblationSpec(s, 7), 99);
    EXPECT_EQ(r.std, 0.0) << s;
    return r.mean;
  };
  EXPECT_EQ(mean("BUDGET(0.5)"), 0.4);   // round(2.5) = 3 kept
  EXPECT_EQ(mean("BUDGET(0.01)"), 0.8);  // floor of one mutant
  EXPECT_EQ(mean("BUDGET(0.7)"), 0.2);   // round(3.5) = 4
  EXPECT_EQ(mean("BUDGET(1)"), 0.0);
  EXPECT_EQ(mean("RANDOM_LLM_REMOVAL(0.5)"), 0.2);  // one of two dropped
}

TEST(AblationTest, FullBudgetIsBaseline) {
  auto ms = Synthetic();
  ms.push_back(OneSurvivorEach());
  AblationRow b = BaselineRow(ms);
  AblationRow r = RunAblation(ms, ParseAblationSpec("BUDGET(1.0)", 50), 5);
  EXPECT_EQ(r.mean, b.mean);
  EXPECT_EQ(r.std, 0.0);
  EXPECT_EQ(r.trials, 50);
}

TEST(AblationTest, SeedDeterminism) {
  auto ms = Synthetic();
  ms.push_back(OneSurvivorEach());
  for (const char* s : {"BUDGET(0.4)", "RANDOM_OPERATOR_REMOVAL(2)",
                        "RANDOM_LLM_REMOVAL(0.5)"}) {
    AblationRow a = RunAblation(ms, ParseAblationSpec(s, 50), 42);
    AblationRow b = RunAblation(ms, ParseAblationSpec(s, 50), 42);
    EXPECT_EQ(a.per_trial, b.per_trial);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std, b.std);
    // Trial t depends on seed + t only.
    AblationRow shifted = RunAblation(ms, ParseAblationSpec(s, 49), 43);
    EXPECT_EQ(std::vector<double>(a.per_trial.begin() + 1, a.per_trial.end()),
              shifted.per_trial);
  }
}

TEST(AblationTest, PopulationStd) {
  // Two trials can only differ if the draw matters: one mutant of two is
  // kept; the row is complete iff the survivor mutant is dropped.
  std::vector<KillMatrix> ms = {
      Matrix("P", {"", "OPERATOR", "OPERATOR"}, {"", "a", "b"}, {{1, 0, 1}})};
  AblationRow r = RunAblation(ms, ParseAblationSpec("BUDGET(0.5)", 200), 1);
  double sum = 0;
  for (double v : r.per_trial) {
    EXPECT_TRUE(v == 0.0 || v == 1.0);
    sum += v;
  }
  double mean = sum / 200;
  double var = 0;
  for (double v : r.per_trial) var += (v - mean) * (v - mean);
  EXPECT_NEAR(r.mean, mean, 1e-12);
  EXPECT_NEAR(r.std, std::sqrt(var / 200), 1e-12);
  EXPECT_GT(r.std, 0.0);
}

// Comp@1 over any mutant subset is at least Comp@1 over all mutants.
TEST(AblationPropertyTest, SubsetMonotonicity) {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 300; ++iter) {
    std::vector<KillMatrix> ms;
    int tasks = 1 + static_cast<int>(rng() % 4);
    for (int t = 0; t < tasks; ++t) {
      int nv = 1 + static_cast<int>(rng() % 8);
      int ns = 1 + static_cast<int>(rng() % 5);
      std::vector<std::string> schemes(nv, "OPERATOR"), ops(nv, "op");
      schemes[0] = ops[0] = "";
      std::vector<std::vector<int>> rows(ns, std::vector<int>(nv));
      for (auto& row : rows) {
        for (int j = 0; j < nv; ++j) {
          int r = static_cast<int>(rng() % 5);
          row[j] = r < 3 ? (j == 0 ? 1 : 0) : static_cast<int>(r % 3) - 1;
        }
      }
      ms.push_back(Matrix("t" + std::to_string(t), schemes, ops, rows));
    }
    std::vector<std::vector<bool>> full, sub;
    for (const auto& m : ms) {
      full.emplace_back(m.variant_ids.size(), true);
      std::vector<bool> k(m.variant_ids.size(), true);
      for (std::size_t j = 1; j < k.size(); ++j) k[j] = rng() % 2;
      sub.push_back(k);
    }
    Fraction a = Comp1(ms, full), b = Comp1(ms, sub);
    EXPECT_GE(b.num * a.den, a.num * b.den);
    EXPECT_GE(b.ToDouble(), a.ToDouble());
  }
}

TEST(ReportTest, BuildsTableRows) {
  MetricReport r = BuildMetricReport({Stats("a", 5, 5, 5)});
  for (int k : {1, 3, 5}) {
    EXPECT_EQ(r.corr_at[k], 1.0);
    EXPECT_EQ(r.comp_at[k], 1.0);
    EXPECT_EQ(r.delta_at[k], 0.0);
    EXPECT_EQ(*r.rho_at[k], 1.0);
  }
  MetricReport z = BuildMetricReport({Stats("a", 5, 0, 0)});
  EXPECT_FALSE(z.rho_at[1]);
  EXPECT_FALSE(z.c2c);
  EXPECT_FALSE(z.per_method_gap["a"]);
}

}  // namespace
}  // namespace mutspec
