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

#include "mutspec/metrics.h"

#include <cmath>
#include <cstdio>
#include <random>
#include <regex>
#include <set>

#include "mutspec/error.h"

namespace mutspec {

SampleStats MakeSampleStats(std::string task_id,
                            std::vector<SampleOutcome> samples) {
  SampleStats s;
  s.task_id = std::move(task_id);
  s.n = static_cast<int>(samples.size());
  for (const SampleOutcome& o : samples) {
    if (o.complete && !o.correct) {
      throw Error(ErrorCode::kInvalidArgument,
                  s.task_id + ": sample complete but not correct");
    }
    s.c_corr += o.correct;
    s.c_comp += o.complete;
  }
  s.per_sample = std::move(samples);
  return s;
}

double PassAtK(int n, int c, int k) {
  if (k > n) {
    throw Error(ErrorCode::kKExceedsN,
                "k=" + std::to_string(k) + " > n=" + std::to_string(n));
  }
  if (k < 1 || c < 0 || c > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "pass@k needs 1 <= k <= n and 0 <= c <= n (n=" +
                    std::to_string(n) + ", c=" + std::to_string(c) +
                    ", k=" + std::to_string(k) + ")");
  }
  if (n - c < k) return 1.0;
  // C(n-c,k)/C(n,k) = prod_{i<k} (n-c-i)/(n-i)
  long double ratio = 1.0L;
  for (int i = 0; i < k; ++i) {
    ratio *= static_cast<long double>(n - c - i) / (n - i);
  }
  return static_cast<double>(1.0L - ratio);
}

CorrComp CorrCompAtK(const std::vector<SampleStats>& stats, int k) {
  CorrComp out;
  if (stats.empty()) return out;
  for (const SampleStats& s : stats) {
    if (k > s.n) {
      throw Error(ErrorCode::kKExceedsN,
                  s.task_id + ": k=" + std::to_string(k) +
                      " > n=" + std::to_string(s.n));
    }
    out.corr += PassAtK(s.n, s.c_corr, k);
    out.comp += PassAtK(s.n, s.c_comp, k);
  }
  out.corr /= static_cast<double>(stats.size());
  out.comp /= static_cast<double>(stats.size());
  return out;
}

Gap GapMetrics(double corr, double comp) {
  Gap g;
  g.delta = corr - comp;
  if (corr != 0) g.rho = comp / corr;
  return g;
}

std::optional<double> C2cRatio(const std::vector<SampleStats>& stats) {
  long long corr = 0, comp = 0;
  for (const SampleStats& s : stats) {
    corr += s.c_corr;
    comp += s.c_comp;
  }
  if (corr == 0) return std::nullopt;
  return static_cast<double>(comp) / static_cast<double>(corr);
}

std::optional<double> MethodLevelGap(const SampleStats& stats) {
  if (stats.n < 1) {
    throw Error(ErrorCode::kInvalidArgument, stats.task_id + ": n < 1");
  }
  if (stats.c_corr == 0) return std::nullopt;
  return static_cast<double>(stats.c_corr - stats.c_comp) / stats.n;
}

namespace {

struct FdrCounts {
  long long complete = 0;
  long long failing = 0;
  bool both_sides = false;
};

FdrCounts CountFdr(const KillMatrix& m, const std::vector<bool>& in_s) {
  FdrCounts out;
  bool has_s = false, has_other = false;
  for (std::size_t j = 1; j < m.variant_ids.size(); ++j) {
    (in_s[j] ? has_s : has_other) = true;
  }
  out.both_sides = has_s && has_other;
  if (!out.both_sides) return out;
  for (const auto& row : m.cells) {
    bool s_complete = row[0] == 1;
    bool other_killed = true;
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (in_s[j]) {
        s_complete = s_complete && row[j] == 0;
      } else {
        other_killed = other_killed && row[j] == 0;
      }
    }
    if (!s_complete) continue;
    ++out.complete;
    if (!other_killed) ++out.failing;
  }
  return out;
}

std::optional<double> FdrOf(long long complete, long long failing,
                            bool any_both) {
  if (!any_both || complete == 0) return std::nullopt;
  return static_cast<double>(failing) / static_cast<double>(complete);
}

}  // namespace

std::optional<double> CrossSchemeFdr(const std::vector<KillMatrix>& matrices,
                                     const std::string& s) {
  long long complete = 0, failing = 0;
  bool any = false;
  for (const KillMatrix& m : matrices) {
    std::vector<bool> in_s(m.variant_ids.size());
    for (std::size_t j = 1; j < in_s.size(); ++j) {
      in_s[j] = m.variant_schemes[j] == s;
    }
    FdrCounts c = CountFdr(m, in_s);
    any = any || c.both_sides;
    complete += c.complete;
    failing += c.failing;
  }
  return FdrOf(complete, failing, any);
}

std::optional<double> CrossSchemeFdr(
    const KillMatrix& matrix,
    const std::map<std::string, std::string>& scheme_of, const std::string& s) {
  std::vector<bool> in_s(matrix.variant_ids.size());
  for (std::size_t j = 1; j < in_s.size(); ++j) {
    auto it = scheme_of.find(matrix.variant_ids[j]);
    if (it == scheme_of.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "no scheme for " + matrix.variant_ids[j]);
    }
    in_s[j] = it->second == s;
  }
  FdrCounts c = CountFdr(matrix, in_s);
  return FdrOf(c.complete, c.failing, c.both_sides);
}

SampleStats StatsFromMatrix(const KillMatrix& m, const std::vector<bool>& keep) {
  std::vector<SampleOutcome> samples;
  for (const auto& row : m.cells) {
    SampleOutcome o;
    o.correct = row[0] == 1;
    o.complete = o.correct;
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (keep[j] && row[j] != 0) o.complete = false;
    }
    samples.push_back(o);
  }
  return MakeSampleStats(m.task_id, std::move(samples));
}

SampleStats StatsFromMatrix(const KillMatrix& m) {
  return StatsFromMatrix(m, std::vector<bool>(m.variant_ids.size(), true));
}

// ---- exact fractions -------------------------------------------------------

namespace {

__int128 Gcd(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

__int128 Mul(__int128 a, __int128 b) {
  __int128 r;
  Ensure(!__builtin_mul_overflow(a, b, &r), "fraction overflow");
  return r;
}

Fraction Make(__int128 num, __int128 den) {
  Ensure(den != 0, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 g = Gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

Fraction Add(const Fraction& a, const Fraction& b) {
  __int128 g = Gcd(a.den, b.den);
  __int128 l = Mul(a.den / g, b.den);
  __int128 sum;
  Ensure(!__builtin_add_overflow(Mul(a.num, l / a.den), Mul(b.num, l / b.den),
                                 &sum),
         "fraction overflow");
  return Make(sum, l);
}

Fraction Sub(const Fraction& a, const Fraction& b) {
  return Add(a, Fraction{-b.num, b.den});
}

Fraction MulF(const Fraction& a, const Fraction& b) {
  Fraction x = Make(a.num, b.den);
  Fraction y = Make(b.num, a.den);
  return Make(Mul(x.num, y.num), Mul(x.den, y.den));
}

// Comp@1 of one task: c_comp / n.
Fraction TaskComp1(const KillMatrix& m, const std::vector<bool>& keep) {
  SampleStats s = StatsFromMatrix(m, keep);
  if (s.n < 1) throw Error(ErrorCode::kKExceedsN, m.task_id + ": k=1 > n=0");
  return Make(s.c_comp, s.n);
}

}  // namespace

double Fraction::ToDouble() const {
  return static_cast<double>(static_cast<long double>(num) /
                             static_cast<long double>(den));
}

Fraction Comp1(const std::vector<KillMatrix>& matrices,
               const std::vector<std::vector<bool>>& keep) {
  Ensure(keep.size() == matrices.size(), "one mask per matrix");
  Fraction total;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    total = Add(total, TaskComp1(matrices[i], keep[i]));
  }
  if (matrices.empty()) return total;
  return Make(total.num, Mul(total.den, matrices.size()));
}

// ---- ablation ---------------------------------------------------------------

namespace {

constexpr const char* kKindNames[] = {"OPERATOR_EXCLUDE", "SCHEME_EXCLUDE",
                                      "BUDGET", "RANDOM_OPERATOR_REMOVAL",
                                      "RANDOM_LLM_REMOVAL"};

std::string FormatFraction(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", f);
  return buf;
}

// Unbiased draw in [0, bound).
std::uint64_t Below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// `count` distinct positions of `items`, by partial Fisher-Yates.
std::vector<std::size_t> Pick(std::vector<std::size_t> items, std::size_t count,
                              std::mt19937_64& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + Below(rng, items.size() - i);
    std::swap(items[i], items[j]);
  }
  items.resize(count);
  return items;
}

std::size_t RoundHalfUp(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5 + 1e-9));
}

std::vector<std::vector<bool>> FullMasks(const std::vector<KillMatrix>& ms) {
  std::vector<std::vector<bool>> keep;
  for (const KillMatrix& m : ms) keep.emplace_back(m.variant_ids.size(), true);
  return keep;
}

std::set<std::string> OperatorUniverse(const std::vector<KillMatrix>& ms) {
  std::set<std::string> ops;
  for (const KillMatrix& m : ms) {
    for (std::size_t j = 1; j < m.variant_ids.size(); ++j) {
      if (!m.variant_operators[j].empty()) ops.insert(m.variant_operators[j]);
    }
  }
  return ops;
}

void CheckFraction(double f, bool allow_zero) {
  if (!(f <= 1.0) || (allow_zero ? f < 0.0 : f <= 0.0)) {
    throw Error(ErrorCode::kFractionOutOfRange,
                "fraction " + FormatFraction(f) + " outside " +
                    (allow_zero ? "[0, 1]" : "(0, 1]"));
  }
}

std::vector<std::vector<bool>> TrialMasks(const std::vector<KillMatrix>& ms,
                                          const AblationSpec& spec,
                                          std::mt19937_64& rng) {
  std::vector<std::vector<bool>> keep = FullMasks(ms);
  switch (spec.kind) {
    case AblationKind::kOperatorExclude:
      for (std::size_t i = 0; i < ms.size(); ++i) {
        for (std::size_t j = 1; j < keep[i].size(); ++j) {
          if (ms[i].variant_operators[j] == spec.name) keep[i][j] = false;
        }
      }
      break;
    case AblationKind::kSchemeExclude:
      for (std::size_t i = 0; i < ms.size(); ++i) {
        for (std::size_t j = 1; j < keep[i].size(); ++j) {
          if (ms[i].variant_schemes[j] == spec.name) keep[i][j] = false;
        }
      }
      break;
    case AblationKind::kBudget:
      for (std::size_t i = 0; i < ms.size(); ++i) {
        std::size_t total = keep[i].size() - 1;
        if (total == 0) continue;
        std::size_t size = std::min(
            total, std::max<std::size_t>(1, RoundHalfUp(spec.fraction * total)));
        std::vector<std::size_t> all;
        for (std::size_t j = 1; j <= total; ++j) all.push_back(j);
        std::fill(keep[i].begin() + 1, keep[i].end(), false);
        for (std::size_t j : Pick(all, size, rng)) keep[i][j] = true;
      }
      break;
    case AblationKind::kRandomOperatorRemoval: {
      std::set<std::string> u = OperatorUniverse(ms);
      std::vector<std::string> names(u.begin(), u.end());
      std::vector<std::size_t> idx(names.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::set<std::string> removed;
      for (std::size_t i : Pick(idx, spec.count, rng)) removed.insert(names[i]);
      for (std::size_t i = 0; i < ms.size(); ++i) {
        for (std::size_t j = 1; j < keep[i].size(); ++j) {
          if (removed.count(ms[i].variant_operators[j])) keep[i][j] = false;
        }
      }
      break;
    }
    case AblationKind::kRandomLlmRemoval:
      for (std::size_t i = 0; i < ms.size(); ++i) {
        std::vector<std::size_t> llm;
        for (std::size_t j = 1; j < keep[i].size(); ++j) {
          if (ms[i].variant_schemes[j] == "LLM") llm.push_back(j);
        }
        std::size_t n = RoundHalfUp(spec.fraction * llm.size());
        for (std::size_t j : Pick(llm, n, rng)) keep[i][j] = false;
      }
      break;
  }
  return keep;
}

AblationRow Summarize(std::string label, const std::vector<Fraction>& values) {
  AblationRow row;
  row.label = std::move(label);
  row.trials = static_cast<int>(values.size());
  Fraction sum;
  for (const Fraction& v : values) {
    sum = Add(sum, v);
    row.per_trial.push_back(v.ToDouble());
  }
  Fraction mean = Make(sum.num, Mul(sum.den, values.size()));
  Fraction var;
  for (const Fraction& v : values) {
    Fraction d = Sub(v, mean);
    var = Add(var, MulF(d, d));
  }
  var = Make(var.num, Mul(var.den, values.size()));
  row.mean = mean.ToDouble();
  row.std = std::sqrt(var.ToDouble());
  return row;
}

}  // namespace

AblationSpec ParseAblationSpec(const std::string& text, int trials) {
  static const std::regex kForm(R"(^([A-Z_]+)\(([^()]+)\)$)");
  std::smatch m;
  if (!std::regex_match(text, m, kForm)) {
    throw Error(ErrorCode::kInvalidArgument, "bad ablation '" + text + "'");
  }
  AblationSpec spec;
  spec.trials = trials;
  std::string kind = m[1], arg = m[2];
  auto number = [&] {
    try {
      std::size_t used = 0;
      double v = std::stod(arg, &used);
      if (used == arg.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::kInvalidArgument, "bad number in '" + text + "'");
  };
  if (kind == "OPERATOR_EXCLUDE") {
    spec.kind = AblationKind::kOperatorExclude;
    spec.name = arg;
  } else if (kind == "SCHEME_EXCLUDE") {
    spec.kind = AblationKind::kSchemeExclude;
    spec.name = arg;
  } else if (kind == "BUDGET") {
    spec.kind = AblationKind::kBudget;
    spec.fraction = number();
  } else if (kind == "RANDOM_OPERATOR_REMOVAL") {
    spec.kind = AblationKind::kRandomOperatorRemoval;
    double c = number();
    if (c != std::floor(c) || c < 0) {
      throw Error(ErrorCode::kInvalidArgument, "bad count in '" + text + "'");
    }
    spec.count = static_cast<int>(c);
  } else if (kind == "RANDOM_LLM_REMOVAL") {
    spec.kind = AblationKind::kRandomLlmRemoval;
    spec.fraction = number();
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown ablation '" + kind + "'");
  }
  return spec;
}

std::string AblationLabel(const AblationSpec& spec) {
  std::string arg;
  switch (spec.kind) {
    case AblationKind::kOperatorExclude:
    case AblationKind::kSchemeExclude:
      arg = spec.name;
      break;
    case AblationKind::kBudget:
    case AblationKind::kRandomLlmRemoval:
      arg = FormatFraction(spec.fraction);
      break;
    case AblationKind::kRandomOperatorRemoval:
      arg = std::to_string(spec.count);
      break;
  }
  return std::string(kKindNames[static_cast<int>(spec.kind)]) + "(" + arg + ")";
}

AblationRow RunAblation(const std::vector<KillMatrix>& matrices,
                        const AblationSpec& spec, std::uint64_t seed) {
  if (spec.trials < 1) {
    throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  }
  switch (spec.kind) {
    case AblationKind::kOperatorExclude:
      if (!OperatorUniverse(matrices).count(spec.name)) {
        throw Error(ErrorCode::kUnknownOperator, spec.name);
      }
      break;
    case AblationKind::kSchemeExclude:
      ParseMutationScheme(spec.name);
      break;
    case AblationKind::kBudget:
      CheckFraction(spec.fraction, false);
      break;
    case AblationKind::kRandomLlmRemoval:
      CheckFraction(spec.fraction, true);
      break;
    case AblationKind::kRandomOperatorRemoval: {
      std::size_t u = OperatorUniverse(matrices).size();
      if (spec.count < 0 || static_cast<std::size_t>(spec.count) > u) {
        throw Error(ErrorCode::kFractionOutOfRange,
                    "cannot remove " + std::to_string(spec.count) + " of " +
                        std::to_string(u) + " operators");
      }
      break;
    }
  }
  std::vector<Fraction> values;
  for (int t = 0; t < spec.trials; ++t) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t));
    values.push_back(Comp1(matrices, TrialMasks(matrices, spec, rng)));
  }
  return Summarize(AblationLabel(spec), values);
}

AblationRow BaselineRow(const std::vector<KillMatrix>& matrices) {
  return Summarize("BASELINE", {Comp1(matrices, FullMasks(matrices))});
}

MetricReport BuildMetricReport(const std::vector<SampleStats>& stats,
                               const std::vector<int>& k_values) {
  MetricReport r;
  r.k_values = k_values;
  for (int k : k_values) {
    CorrComp cc = CorrCompAtK(stats, k);
    Gap g = GapMetrics(cc.corr, cc.comp);
    r.corr_at[k] = cc.corr;
    r.comp_at[k] = cc.comp;
    r.delta_at[k] = g.delta;
    r.rho_at[k] = g.rho;
  }
  r.c2c = C2cRatio(stats);
  for (const SampleStats& s : stats) r.per_method_gap[s.task_id] = MethodLevelGap(s);
  return r;
}

}  // namespace mutspec
