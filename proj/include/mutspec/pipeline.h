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

#ifndef MUTSPEC_PIPELINE_H_
#define MUTSPEC_PIPELINE_H_

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mutspec/frontend.h"
#include "mutspec/harness.h"
#include "mutspec/llmclient.h"
#include "mutspec/mutgen.h"
#include "mutspec/validate.h"

namespace mutspec {

struct SelectionConfig {
  int min_comment_words = 15;  // strictly more words required
  int min_loc = 15;
  int min_cc = 3;
  double min_coverage = 0.90;
  int min_mutants = 5;
  int target_count = 0;
};
void from_json(const nlohmann::json& j, SelectionConfig& c);
void to_json(nlohmann::json& j, const SelectionConfig& c);

// Keeps records with comment_words > min, (loc >= min_loc or cc >= min_cc)
// and coverage >= min. Records without coverage are skipped with a warning.
std::vector<MethodRecord> FilterCandidateMethods(
    const std::vector<MethodRecord>& records, const SelectionConfig& cfg);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  // One raw vector per text. Throws Error(kProviderError).
  virtual std::vector<std::vector<double>> Embed(
      const std::vector<std::string>& texts) = 0;
};

// Character trigrams hashed (FNV-1a, 32 bit) into 256 buckets.
class TrigramHashProvider : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDims = 256;
  std::string name() const override { return "trigram-hash"; }
  std::vector<std::vector<double>> Embed(
      const std::vector<std::string>& texts) override;
};

// POST {"model", "input": [...]} and read data[i].embedding.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string endpoint, std::string model,
                        std::string auth_env_var,
                        std::shared_ptr<HttpBackend> backend = nullptr,
                        int timeout_ms = 60000);
  std::string name() const override { return "http:" + model_; }
  std::vector<std::vector<double>> Embed(
      const std::vector<std::string>& texts) override;

 private:
  std::string endpoint_;
  std::string model_;
  std::string auth_env_var_;
  std::shared_ptr<HttpBackend> backend_;
  int timeout_ms_;
};

// Unit vectors, one per header. Throws kInvalidArgument on empty headers,
// kProviderError on provider failure or a zero vector.
std::vector<std::vector<double>> EmbedHeaders(
    const std::vector<std::string>& headers, EmbeddingProvider& provider);

// Greedy max-min selection under cosine distance 1 - dot. Starts at index 0;
// ties go to the lowest index. Throws kCountExceedsPopulation.
std::vector<std::size_t> FarthestFirstSelect(
    const std::vector<std::vector<double>>& vectors, std::size_t count);

struct TestFile {
  std::string path;  // relative, '/'-separated
  std::string text;
};

struct BenchmarkInstance {
  std::string task_id;
  std::string method_name;
  std::string adapter_id;
  std::string sig;
  std::string nl;
  std::string impl;       // the unit holding the method
  std::string impl_path;  // its path inside the project
  RunnerSpec runner;
  std::vector<TestFile> tests;
  std::vector<Mutant> mutants;
  std::vector<PostconditionSet> postconditions;
  std::string language_tag;
  DependencyClass dependency_class = DependencyClass::kStandalone;
  LocBucket loc_bucket = LocBucket::kShort;
};

// Throws kTooFewMutants (fewer than `min_mutants` DEFECTIVE), kMissingTests.
// Only DEFECTIVE mutants are packaged.
BenchmarkInstance AssembleInstance(const TaskContext& task,
                                   const std::vector<Mutant>& mutants,
                                   const std::vector<PostconditionSet>& psets,
                                   const RunnerSpec& runner,
                                   const std::set<std::string>& allowlist,
                                   int min_mutants = 5);

// Writes <root>/<task_id>/ and returns that directory.
std::filesystem::path WriteInstance(const BenchmarkInstance& inst,
                                    const std::filesystem::path& root);
BenchmarkInstance LoadInstance(const std::filesystem::path& dir);

// Sorted keys, two-space indent, trailing LF.
std::string StableJson(const nlohmann::json& j);

// ---- environment repair ----------------------------------------------------

struct RepairEdit {
  std::string file;
  bool accepted = false;
  std::string reason;  // rejection reason
  std::string diff;
};

struct RepairRound {
  int round = 0;
  bool check_passed = false;
  std::optional<int> exit_status;
  bool timed_out = false;
  std::string log_excerpt;
  std::string request_id;  // empty for round 0
  std::string response;
  std::vector<RepairEdit> edits;
};

struct RepairReport {
  bool success = false;
  std::vector<RepairRound> rounds;  // round 0 is the initial check
  int accepted_edits() const;
};
void to_json(nlohmann::json& j, const RepairReport& r);

std::set<std::string> DefaultConfigAllowlist();

struct RepairOptions {
  int max_rounds = 5;
  std::set<std::string> allowlist = DefaultConfigAllowlist();
};

// Runs check.test_command inside project_dir; on failure asks the client
// for whole-file replacements of config files (blocks introduced by
// `=== FILE: <name> ===`), applies the allowlisted ones and re-checks.
// Throws kClientError; rejected edits are reported, not thrown.
RepairReport EnvironmentRepairLoop(const std::filesystem::path& project_dir,
                                   const RunnerSpec& check,
                                   CompletionClient& client,
                                   const RepairOptions& options = {});

struct FileEdit {
  std::string file;
  std::string text;
};
std::vector<FileEdit> ParseFileEdits(std::string_view response);

}  // namespace mutspec

#endif  // MUTSPEC_PIPELINE_H_
