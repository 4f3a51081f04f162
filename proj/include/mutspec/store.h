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

#ifndef MUTSPEC_STORE_H_
#define MUTSPEC_STORE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mutspec/metrics.h"

namespace mutspec {

// Input settings: code only, natural language only, both.
enum class Setting { kC2P, kN2P, kF2P };
std::string_view SettingName(Setting s);
Setting ParseSetting(std::string_view name);

struct ResultRecord {
  std::string run_id;
  std::string task_id;
  Setting setting = Setting::kC2P;
  std::string model_tag;
  int sample_index = 0;
  bool correct = false;
  bool complete = false;
  std::string kill_row_ref;
  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};
void to_json(nlohmann::json& j, const ResultRecord& r);
void from_json(const nlohmann::json& j, ResultRecord& r);

struct RunManifest {
  std::string run_id;
  std::string config_snapshot;  // the config file, byte for byte
  std::string tool_version;
  std::uint64_t seed = 0;
  std::string started;  // UTC, ISO 8601
  std::string finished;
};
void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

inline constexpr std::string_view kToolVersion = "0.1.0";

std::string UtcNow();
// <yyyymmddThhmmssZ>-<6 hex>.
std::string NewRunId();

// Layout under the store root:
//   results.jsonl              all result records
//   runs/<run_id>/manifest.json, stage outputs
//   runs/LATEST                the most recently started run id
//   reports/<run_id>/          report.txt, report.csv, gaps.csv
class Store {
 public:
  explicit Store(std::filesystem::path root);

  // Creates the directory tree. Throws kIoError.
  void Init() const;
  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path results_path() const { return root_ / "results.jsonl"; }
  std::filesystem::path run_dir(std::string_view run_id) const;
  std::filesystem::path report_dir(std::string_view run_id) const;

  // Starts a run: writes its manifest and makes it LATEST. Throws
  // kDuplicateKey when the id is taken.
  void BeginRun(const RunManifest& manifest) const;
  void FinishRun(std::string_view run_id) const;
  RunManifest LoadRun(std::string_view run_id) const;
  // Throws kIoError when the store holds no run.
  std::string LatestRun() const;

  // Appends atomically with respect to readers (one write, fsync'd).
  // Duplicate (run, task, model, setting, index) keys, against the store or
  // within the batch, reject the whole batch. Throws kDuplicateKey,
  // kIoError, kInvalidArgument (complete but not correct).
  int AppendRecords(const std::vector<ResultRecord>& records) const;

  // A truncated trailing line (no LF) is ignored with a warning; any other
  // malformed line throws kIoError.
  std::vector<ResultRecord> ReadRecords() const;

 private:
  std::filesystem::path root_;
};

struct RecordQuery {
  std::optional<std::string> run_id;
  std::optional<std::string> task_id;
  std::optional<std::string> model_tag;
  std::optional<Setting> setting;
  bool Matches(const ResultRecord& r) const;
};

// Groups by (task, model, setting), n = max index + 1, ordered by key.
// Throws kEmptySelection, kMissingSample (listing the absent indices).
std::vector<SampleStats> AggregateRecords(const std::vector<ResultRecord>& records,
                                          const RecordQuery& query);
std::vector<SampleStats> Aggregate(const Store& store, const RecordQuery& query);

// ---- reports ---------------------------------------------------------------

struct ReportRow {
  std::string model_tag;
  std::string setting;
  int tasks = 0;
  MetricReport metrics;
};

// One row per (model, setting) in key order. Throws kKExceedsN,
// kEmptySelection.
std::vector<ReportRow> BuildReportRows(const std::vector<SampleStats>& stats,
                                       const std::vector<int>& k_values);

// Three decimals; UNDEFINED renders as an em dash.
std::string FormatMetric(std::optional<double> v);
inline constexpr std::string_view kUndefinedCell = "\xE2\x80\x94";

std::string RenderReportCsv(const std::vector<ReportRow>& rows,
                            const std::vector<int>& k_values);
std::string RenderReportText(const std::vector<ReportRow>& rows,
                             const std::vector<int>& k_values);
// Per-method gaps, one line per (model, setting, task).
std::string RenderGapsCsv(const std::vector<SampleStats>& stats);

// Header plus cells; metric cells parse to nullopt for the undefined mark.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable ParseCsv(std::string_view text);
std::optional<double> ParseMetricCell(std::string_view cell);

// Writes report.txt, report.csv and gaps.csv under the run's report
// directory and returns it. Throws kIoError, kEmptySelection.
std::filesystem::path EmitReport(const Store& store, std::string_view run_id,
                                 const std::vector<SampleStats>& stats,
                                 const std::vector<int>& k_values = {1, 3, 5});

}  // namespace mutspec

#endif  // MUTSPEC_STORE_H_
