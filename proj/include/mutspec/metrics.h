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

#ifndef MUTSPEC_METRICS_H_
#define MUTSPEC_METRICS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mutspec/validate.h"

namespace mutspec {

struct SampleOutcome {
  bool correct = false;
  bool complete = false;
};

struct SampleStats {
  std::string task_id;
  std::string model_tag;  // grouping labels, may be empty
  std::string setting;
  int n = 0;
  int c_corr = 0;
  int c_comp = 0;
  std::vector<SampleOutcome> per_sample;
};

// Builds stats from per-sample outcomes; throws kInvalidArgument when some
// sample is complete but not correct.
SampleStats MakeSampleStats(std::string task_id,
                            std::vector<SampleOutcome> samples);

// 1 - C(n-c, k) / C(n, k). Throws kKExceedsN when k > n, kInvalidArgument
// for k < 1 or c outside [0, n].
double PassAtK(int n, int c, int k);

struct CorrComp {
  double corr = 0;
  double comp = 0;
};
CorrComp CorrCompAtK(const std::vector<SampleStats>& stats, int k);

struct Gap {
  double delta = 0;
  std::optional<double> rho;  // nullopt: UNDEFINED
};
Gap GapMetrics(double corr, double comp);

std::optional<double> C2cRatio(const std::vector<SampleStats>& stats);
// nullopt: EXCLUDED (no correct sample).
std::optional<double> MethodLevelGap(const SampleStats& stats);

// Among sets complete w.r.t. the mutants of scheme `s`, the fraction that
// leave some mutant of the other schemes alive. nullopt when no set is
// S-complete or a side has no mutants.
std::optional<double> CrossSchemeFdr(const std::vector<KillMatrix>& matrices,
                                     const std::string& s);
std::optional<double> CrossSchemeFdr(
    const KillMatrix& matrix, const std::map<std::string, std::string>& scheme_of,
    const std::string& s);

// Per-set outcomes of a matrix restricted to the variants with keep[j]
// (keep[0], the original, is always honored as kept).
SampleStats StatsFromMatrix(const KillMatrix& m, const std::vector<bool>& keep);
SampleStats StatsFromMatrix(const KillMatrix& m);

// Comp@1 over the matrices with the given per-matrix variant masks, as an
// exact fraction.
struct Fraction {
  __int128 num = 0;
  __int128 den = 1;
  double ToDouble() const;
  friend bool operator==(const Fraction& a, const Fraction& b) {
    return a.num == b.num && a.den == b.den;
  }
};
Fraction Comp1(const std::vector<KillMatrix>& matrices,
               const std::vector<std::vector<bool>>& keep);

enum class AblationKind {
  kOperatorExclude,
  kSchemeExclude,
  kBudget,
  kRandomOperatorRemoval,
  kRandomLlmRemoval,
};

struct AblationSpec {
  AblationKind kind = AblationKind::kBudget;
  std::string name;       // operator or scheme
  double fraction = 1.0;  // BUDGET, RANDOM_LLM_REMOVAL
  int count = 0;          // RANDOM_OPERATOR_REMOVAL
  int trials = 1;
};

// `OPERATOR_EXCLUDE(math)`, `SCHEME_EXCLUDE(LLM)`, `BUDGET(0.8)`,
// `RANDOM_OPERATOR_REMOVAL(5)`, `RANDOM_LLM_REMOVAL(0.5)`.
AblationSpec ParseAblationSpec(const std::string& text, int trials = 1);
std::string AblationLabel(const AblationSpec& spec);

struct AblationRow {
  std::string label;
  double mean = 0;
  double std = 0;  // population
  int trials = 0;
  std::vector<double> per_trial;
};

// Comp@1 under the variant. Trial t draws from mt19937_64(seed + t).
// Throws kUnknownOperator, kFractionOutOfRange.
AblationRow RunAblation(const std::vector<KillMatrix>& matrices,
                        const AblationSpec& spec, std::uint64_t seed);
AblationRow BaselineRow(const std::vector<KillMatrix>& matrices);

struct MetricReport {
  std::vector<int> k_values;
  std::map<int, double> corr_at;
  std::map<int, double> comp_at;
  std::map<int, double> delta_at;
  std::map<int, std::optional<double>> rho_at;
  std::optional<double> c2c;
  std::map<std::string, std::optional<double>> per_method_gap;
  std::optional<double> fdr;
  std::vector<AblationRow> ablation_rows;
};

// Throws kKExceedsN when some task has fewer samples than a k.
MetricReport BuildMetricReport(const std::vector<SampleStats>& stats,
                               const std::vector<int>& k_values = {1, 3, 5});

}  // namespace mutspec

#endif  // MUTSPEC_METRICS_H_
