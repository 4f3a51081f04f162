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

#include "mutspec/validate.h"

#include <spdlog/spdlog.h>

#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "mutspec/error.h"
#include "mutspec/parallel.h"
#include "mutspec/text.h"

namespace mutspec {

bool CheckCorrectness(int original_value, bool* harness_error) {
  if (harness_error) *harness_error = original_value == -1;
  return original_value == 1;
}

bool CheckCorrectness(const EvalOutcome& original, bool* harness_error) {
  return CheckCorrectness(original.value, harness_error);
}

ValidationVerdict CheckCompleteness(const std::string& set_id,
                                    const std::vector<int>& row,
                                    const std::vector<std::string>& variant_ids) {
  if (row.empty() || row.size() != variant_ids.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "row of " + std::to_string(row.size()) + " cells for " +
                    std::to_string(variant_ids.size()) + " variants");
  }
  ValidationVerdict v;
  v.set_id = set_id;
  v.correct = CheckCorrectness(row[0], &v.harness_error);
  for (std::size_t h = 1; h < row.size(); ++h) {
    if (row[h] != 0) v.survived_mutants.push_back(variant_ids[h]);
  }
  v.complete = v.correct && v.survived_mutants.empty();
  Ensure(!v.complete || v.correct, "complete implies correct");
  return v;
}

std::vector<ValidationVerdict> Verdicts(const KillMatrix& m) {
  std::vector<ValidationVerdict> out;
  for (std::size_t i = 0; i < m.set_ids.size(); ++i) {
    out.push_back(CheckCompleteness(m.set_ids[i], m.cells[i], m.variant_ids));
  }
  return out;
}

bool RequireMinMutants(const std::vector<Mutant>& mutants, int min_count) {
  long n = std::count_if(mutants.begin(), mutants.end(), [](const Mutant& m) {
    return m.status == MutantStatus::kDefective;
  });
  return n >= min_count;
}

std::pair<SourceUnit, MethodRecord> MaterializeVariant(const TaskContext& task,
                                                       const Mutant& mutant) {
  Mutant m = mutant;
  if (m.rendered_text.empty()) RestoreRenderedText(task.unit, m);
  SourceUnit unit;
  try {
    unit = ParseUnit(m.rendered_text, task.unit.adapter_id, task.unit.path,
                     task.unit.unit_id);
  } catch (const Error& e) {
    throw Error(ErrorCode::kUnparseableResult,
                m.mutant_id + ": " + e.detail());
  }
  for (MethodRecord& rec : ExtractMethods(unit)) {
    if (rec.method_id == task.method.method_id) return {unit, std::move(rec)};
  }
  throw Error(ErrorCode::kUnparseableResult,
              m.mutant_id + ": method " + task.method.method_id +
                  " not found in the mutated unit");
}

namespace {

nlohmann::json CellRecord(const std::string& task, const std::string& set,
                          const std::string& variant, const EvalOutcome& o) {
  nlohmann::json j{{"task", task},
                   {"set", set},
                   {"variant", variant},
                   {"value", o.value},
                   {"kind", OutcomeKindName(o.kind)},
                   {"violated", o.violated_cond_ids},
                   {"ms", o.duration_ms}};
  if (o.harness_error) j["harness_error"] = true;
  return j;
}

}  // namespace

std::vector<nlohmann::json> ReadJournal(const std::filesystem::path& path) {
  std::vector<nlohmann::json> out;
  if (!std::filesystem::exists(path)) return out;
  std::string text = ReadFile(path);
  std::size_t pos = 0;
  std::size_t good_end = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    ++line_no;
    if (nl == std::string::npos) {
      spdlog::warn("{}: ignoring partial trailing line {}", path.string(),
                   line_no);
      break;
    }
    std::string_view line(text.data() + pos, nl - pos);
    if (!Trim(line).empty()) {
      try {
        out.push_back(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kIoError, path.string() + ":" +
                                             std::to_string(line_no) + ": " +
                                             e.what());
      }
    }
    pos = nl + 1;
    good_end = pos;
  }
  if (good_end < text.size()) std::filesystem::resize_file(path, good_end);
  return out;
}

KillMatrix BuildKillMatrix(const TaskContext& task,
                           const std::vector<PostconditionSet>& psets,
                           const std::vector<Mutant>& mutants,
                           const RunnerSpec& spec,
                           const MatrixBuildOptions& options) {
  KillMatrix km;
  km.task_id = task.task_id;
  km.variant_ids.emplace_back(kOriginalVariantId);
  km.variant_schemes.emplace_back();
  km.variant_operators.emplace_back();
  for (const Mutant& m : mutants) {
    if (m.status != MutantStatus::kDefective) {
      throw Error(ErrorCode::kInvalidArgument,
                  m.mutant_id + " is " +
                      std::string(MutantStatusName(m.status)) +
                      ", not DEFECTIVE");
    }
    km.variant_ids.push_back(m.mutant_id);
    km.variant_schemes.emplace_back(MutationSchemeName(m.scheme));
    km.variant_operators.push_back(m.operator_name.value_or(""));
  }
  for (const PostconditionSet& s : psets) km.set_ids.push_back(s.set_id);
  const std::size_t nv = km.variant_ids.size();
  const std::size_t ncell = psets.size() * nv;
  km.cells.assign(psets.size(), std::vector<int>(nv, -1));

  // Reuse journaled cells.
  std::map<std::pair<std::string, std::string>, nlohmann::json> done;
  if (options.journal) {
    for (nlohmann::json& rec : ReadJournal(*options.journal)) {
      if (rec.value("task", "") != task.task_id) continue;
      auto key = std::make_pair(rec.at("set").get<std::string>(),
                                rec.at("variant").get<std::string>());
      done[key] = std::move(rec);
    }
  }

  // Variants are materialized once, up front.
  std::vector<std::pair<SourceUnit, MethodRecord>> variants;
  variants.emplace_back(task.unit, task.method);
  for (const Mutant& m : mutants) variants.push_back(MaterializeVariant(task, m));

  std::vector<std::size_t> todo;
  for (std::size_t c = 0; c < ncell; ++c) {
    auto key = std::make_pair(km.set_ids[c / nv], km.variant_ids[c % nv]);
    auto it = done.find(key);
    if (it == done.end()) {
      todo.push_back(c);
      continue;
    }
    km.cells[c / nv][c % nv] = it->second.at("value").get<int>();
    if (it->second.value("harness_error", false)) {
      km.harness_errors.emplace_back(c / nv, c % nv);
    }
  }

  std::vector<std::optional<EvalOutcome>> results(todo.size());
  std::vector<std::exception_ptr> failures(todo.size());
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<bool> stop{false};
  auto work = [&](std::size_t t) {
    if (stop) return;
    std::size_t c = todo[t];
    const auto& [unit, method] = variants[c % nv];
    EvalOutcome o;
    std::exception_ptr err;
    try {
      o = Evaluate(unit, method, psets[c / nv], spec, task.tests);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kSpawnFailure) {
        o = EvalOutcome{};
        o.harness_error = true;
        o.log_excerpt = e.what();
      } else {
        err = std::current_exception();
      }
    } catch (...) {
      err = std::current_exception();
    }
    {
      std::lock_guard lock(mu);
      if (err) {
        failures[t] = err;
      } else {
        results[t] = std::move(o);
      }
    }
    ready.notify_all();
  };
  std::jthread producer([&] {
    try {
      ParallelFor(todo.size(), options.workers, work);
    } catch (...) {
    }
  });

  // Single writer, deterministic order.
  std::ofstream journal;
  if (options.journal) {
    journal.open(*options.journal, std::ios::app | std::ios::binary);
    if (!journal) {
      stop = true;
      throw Error(ErrorCode::kIoError,
                  "cannot open journal " + options.journal->string());
    }
  }
  for (std::size_t t = 0; t < todo.size(); ++t) {
    EvalOutcome o;
    {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return results[t] || failures[t]; });
      if (failures[t]) {
        stop = true;
        std::rethrow_exception(failures[t]);
      }
      o = *results[t];
    }
    std::size_t c = todo[t];
    km.cells[c / nv][c % nv] = o.value;
    if (o.harness_error) km.harness_errors.emplace_back(c / nv, c % nv);
    if (journal.is_open()) {
      journal << CellRecord(task.task_id, km.set_ids[c / nv],
                            km.variant_ids[c % nv], o)
                     .dump()
              << '\n';
      journal.flush();
    }
  }
  std::sort(km.harness_errors.begin(), km.harness_errors.end());
  if (options.evaluated) *options.evaluated = static_cast<int>(todo.size());
  return km;
}

std::vector<Mutant> FilterDefectiveMutants(const TaskContext& task,
                                           std::vector<Mutant>& mutants,
                                           const RunnerSpec& spec,
                                           int workers) {
  ParallelFor(mutants.size(), workers, [&](std::size_t i) {
    Mutant& m = mutants[i];
    if (m.status != MutantStatus::kCandidate) return;
    PlainRunClass cls;
    try {
      auto [unit, method] = MaterializeVariant(task, m);
      cls = ClassifyPlainRun(RunPlain(unit, spec, task.tests));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnparseableResult &&
          e.code() != ErrorCode::kSpawnFailure) {
        throw;
      }
      spdlog::warn("{}: {}", m.mutant_id, e.what());
      cls = PlainRunClass::kCrash;
    }
    switch (cls) {
      case PlainRunClass::kTestFail:
        m.status = MutantStatus::kDefective;
        break;
      case PlainRunClass::kPass:
        m.status = MutantStatus::kDiscardedPasses;
        break;
      case PlainRunClass::kCrash:
      case PlainRunClass::kTimeout:
        m.status = MutantStatus::kDiscardedCrashes;
        break;
    }
  });
  std::vector<Mutant> out;
  for (const Mutant& m : mutants) {
    if (m.status == MutantStatus::kDefective) out.push_back(m);
  }
  return out;
}

void to_json(nlohmann::json& j, const KillMatrix& m) {
  nlohmann::json errs = nlohmann::json::array();
  for (const auto& [s, v] : m.harness_errors) errs.push_back({s, v});
  j = nlohmann::json{{"task", m.task_id},
                     {"sets", m.set_ids},
                     {"variants", m.variant_ids},
                     {"schemes", m.variant_schemes},
                     {"operators", m.variant_operators},
                     {"cells", m.cells},
                     {"harness_errors", errs}};
}

void from_json(const nlohmann::json& j, KillMatrix& m) {
  m.task_id = j.at("task").get<std::string>();
  m.set_ids = j.at("sets").get<std::vector<std::string>>();
  m.variant_ids = j.at("variants").get<std::vector<std::string>>();
  m.variant_schemes = j.at("schemes").get<std::vector<std::string>>();
  m.variant_operators = j.at("operators").get<std::vector<std::string>>();
  m.cells = j.at("cells").get<std::vector<std::vector<int>>>();
  m.harness_errors.clear();
  for (const auto& e : j.value("harness_errors", nlohmann::json::array())) {
    m.harness_errors.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  }
  const std::size_t nv = m.variant_ids.size();
  bool ok = !m.variant_ids.empty() && m.variant_schemes.size() == nv &&
            m.variant_operators.size() == nv &&
            m.cells.size() == m.set_ids.size();
  for (const auto& row : m.cells) {
    ok = ok && row.size() == nv;
    for (int v : row) ok = ok && v >= -1 && v <= 1;
  }
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument,
                "kill matrix " + m.task_id + ": dimensions do not match");
  }
}

void to_json(nlohmann::json& j, const ValidationVerdict& v) {
  j = nlohmann::json{{"set", v.set_id},
                     {"correct", v.correct},
                     {"complete", v.complete},
                     {"survived", v.survived_mutants},
                     {"harness_error", v.harness_error}};
}

}  // namespace mutspec
