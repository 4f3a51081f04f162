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

#include "mutspec/error.h"
#include "mutspec/pipeline.h"
#include "mutspec/text.h"

namespace mutspec {

namespace fs = std::filesystem;

std::string StableJson(const nlohmann::json& j) {
  // nlohmann::json objects are std::map backed, so keys come out sorted.
  return j.dump(2) + "\n";
}

namespace {

// Relative, '/'-separated, no `..`, no empty segments.
bool SafeRelative(std::string_view p) {
  if (p.empty() || p.front() == '/' || p.find('\\') != std::string_view::npos) {
    return false;
  }
  for (std::string_view rest = p; !rest.empty();) {
    std::size_t slash = rest.find('/');
    std::string_view seg = rest.substr(0, slash);
    if (seg.empty() || seg == "." || seg == "..") return false;
    if (slash == std::string_view::npos) break;
    rest.remove_prefix(slash + 1);
  }
  return true;
}

void RequireSafe(std::string_view p, std::string_view what) {
  if (!SafeRelative(p)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " '" + std::string(p) +
                    "' is not a safe relative path");
  }
}

DependencyClass ParseDependencyClass(std::string_view s) {
  for (auto c : {DependencyClass::kStandalone, DependencyClass::kDependent}) {
    if (DependencyClassName(c) == s) return c;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown dependency class " + std::string(s));
}

LocBucket ParseLocBucket(std::string_view s) {
  for (auto b : {LocBucket::kShort, LocBucket::kMedium, LocBucket::kLong}) {
    if (LocBucketName(b) == s) return b;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown loc bucket " + std::string(s));
}

}  // namespace

BenchmarkInstance AssembleInstance(const TaskContext& task,
                                   const std::vector<Mutant>& mutants,
                                   const std::vector<PostconditionSet>& psets,
                                   const RunnerSpec& runner,
                                   const std::set<std::string>& allowlist,
                                   int min_mutants) {
  if (!RequireMinMutants(mutants, min_mutants)) {
    throw Error(ErrorCode::kTooFewMutants,
                task.task_id + ": fewer than " + std::to_string(min_mutants) +
                    " defective mutants");
  }
  if (task.tests.empty()) {
    throw Error(ErrorCode::kMissingTests, task.task_id + ": empty test manifest");
  }
  BenchmarkInstance inst;
  inst.task_id = task.task_id;
  inst.method_name = task.method.name;
  inst.adapter_id = task.unit.adapter_id;
  inst.sig = task.method.signature;
  inst.nl = task.method.doc_comment;
  inst.impl = task.unit.text;
  inst.impl_path = task.unit.path;
  inst.runner = runner;
  for (const SourceUnit& u : task.tests) inst.tests.push_back({u.path, u.text});
  for (const Mutant& m : mutants) {
    if (m.status == MutantStatus::kDefective) inst.mutants.push_back(m);
  }
  inst.postconditions = psets;
  inst.language_tag = task.unit.adapter_id;
  inst.dependency_class = ClassifyDependency(task.method, allowlist);
  inst.loc_bucket = BucketByLoc(task.method);
  return inst;
}

fs::path WriteInstance(const BenchmarkInstance& inst, const fs::path& root) {
  RequireSafe(inst.task_id, "task id");
  RequireSafe(inst.impl_path, "impl path");
  fs::path dir = root / inst.task_id;
  fs::remove_all(dir);
  fs::create_directories(dir);

  SourceUnit unit;
  unit.unit_id = inst.task_id;
  unit.text = inst.impl;

  nlohmann::json mutants = nlohmann::json::array();
  for (const Mutant& m : inst.mutants) {
    RequireSafe(m.mutant_id, "mutant id");
    nlohmann::json mj = m;
    std::string diff_rel = "mutants/" + m.mutant_id + ".diff";
    mj["diff"] = diff_rel;
    mutants.push_back(mj);
    Mutant full = m;
    RestoreRenderedText(unit, full);
    WriteFileAtomic(dir / diff_rel,
                    RenderUnifiedDiff(inst.impl, full.rendered_text,
                                      "a/" + inst.impl_path,
                                      "b/" + inst.impl_path));
  }
  nlohmann::json psets = nlohmann::json::array();
  for (const PostconditionSet& s : inst.postconditions) {
    RequireSafe(s.set_id, "set id");
    std::string rel = "postconds/" + s.set_id + ".json";
    psets.push_back(rel);
    WriteFileAtomic(dir / rel, StableJson(s));
  }
  nlohmann::json files = nlohmann::json::array();
  for (const TestFile& t : inst.tests) {
    RequireSafe(t.path, "test path");
    files.push_back(t.path);
    WriteFileAtomic(dir / "tests" / "files" / t.path, t.text);
  }
  WriteFileAtomic(dir / "tests" / "manifest.json",
                  StableJson({{"runner", inst.runner}, {"files", files}}));
  WriteFileAtomic(dir / "impl.src", inst.impl);
  nlohmann::json meta{
      {"task_id", inst.task_id},
      {"method", inst.method_name},
      {"adapter", inst.adapter_id},
      {"sig", inst.sig},
      {"nl", inst.nl},
      {"impl", "impl.src"},
      {"impl_path", inst.impl_path},
      {"tests", "tests/manifest.json"},
      {"mutants", mutants},
      {"postconds", psets},
      {"language_tag", inst.language_tag},
      {"dependency_class", DependencyClassName(inst.dependency_class)},
      {"loc_bucket", LocBucketName(inst.loc_bucket)},
  };
  WriteFileAtomic(dir / "instance.json", StableJson(meta));
  return dir;
}

BenchmarkInstance LoadInstance(const fs::path& dir) {
  BenchmarkInstance inst;
  try {
    auto meta = nlohmann::json::parse(ReadFile(dir / "instance.json"));
    inst.task_id = meta.at("task_id").get<std::string>();
    inst.method_name = meta.at("method").get<std::string>();
    inst.adapter_id = meta.at("adapter").get<std::string>();
    inst.sig = meta.at("sig").get<std::string>();
    inst.nl = meta.at("nl").get<std::string>();
    inst.impl_path = meta.at("impl_path").get<std::string>();
    inst.language_tag = meta.at("language_tag").get<std::string>();
    inst.dependency_class =
        ParseDependencyClass(meta.at("dependency_class").get<std::string>());
    inst.loc_bucket = ParseLocBucket(meta.at("loc_bucket").get<std::string>());
    std::string impl_rel = meta.at("impl").get<std::string>();
    RequireSafe(impl_rel, "impl file");
    inst.impl = ReadFile(dir / impl_rel);

    std::string tests_rel = meta.at("tests").get<std::string>();
    RequireSafe(tests_rel, "test manifest");
    auto tm = nlohmann::json::parse(ReadFile(dir / tests_rel));
    inst.runner = tm.at("runner").get<RunnerSpec>();
    for (const auto& f : tm.at("files")) {
      std::string p = f.get<std::string>();
      RequireSafe(p, "test path");
      inst.tests.push_back({p, ReadFile(dir / "tests" / "files" / p)});
    }

    SourceUnit unit;
    unit.unit_id = inst.task_id;
    unit.text = inst.impl;
    for (nlohmann::json mj : meta.at("mutants")) {
      mj.erase("diff");
      Mutant m = mj.get<Mutant>();
      RestoreRenderedText(unit, m);
      inst.mutants.push_back(std::move(m));
    }
    for (const auto& p : meta.at("postconds")) {
      std::string rel = p.get<std::string>();
      RequireSafe(rel, "postcondition file");
      inst.postconditions.push_back(
          nlohmann::json::parse(ReadFile(dir / rel)).get<PostconditionSet>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                dir.string() + ": malformed instance: " + e.what());
  }
  if (inst.tests.empty()) {
    throw Error(ErrorCode::kMissingTests, inst.task_id + ": empty test manifest");
  }
  return inst;
}

}  // namespace mutspec
