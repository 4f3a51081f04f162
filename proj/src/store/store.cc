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

#include "mutspec/store.h"

#include <fcntl.h>
#include <spdlog/spdlog.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <ctime>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "mutspec/error.h"
#include "mutspec/text.h"

namespace mutspec {

namespace fs = std::filesystem;

std::string_view SettingName(Setting s) {
  switch (s) {
    case Setting::kC2P:
      return "C2P";
    case Setting::kN2P:
      return "N2P";
    case Setting::kF2P:
      return "F2P";
  }
  return "C2P";
}

Setting ParseSetting(std::string_view name) {
  for (Setting s : {Setting::kC2P, Setting::kN2P, Setting::kF2P}) {
    if (SettingName(s) == name) return s;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown setting '" + std::string(name) + "'");
}

void to_json(nlohmann::json& j, const ResultRecord& r) {
  j = nlohmann::json{{"run_id", r.run_id},
                     {"task_id", r.task_id},
                     {"setting", SettingName(r.setting)},
                     {"model_tag", r.model_tag},
                     {"sample_index", r.sample_index},
                     {"correct", r.correct},
                     {"complete", r.complete},
                     {"kill_row_ref", r.kill_row_ref}};
}

void from_json(const nlohmann::json& j, ResultRecord& r) {
  r.run_id = j.at("run_id").get<std::string>();
  r.task_id = j.at("task_id").get<std::string>();
  r.setting = ParseSetting(j.at("setting").get<std::string>());
  r.model_tag = j.at("model_tag").get<std::string>();
  r.sample_index = j.at("sample_index").get<int>();
  r.correct = j.at("correct").get<bool>();
  r.complete = j.at("complete").get<bool>();
  r.kill_row_ref = j.value("kill_row_ref", "");
}

void to_json(nlohmann::json& j, const RunManifest& m) {
  j = nlohmann::json{{"run_id", m.run_id},
                     {"config_snapshot", m.config_snapshot},
                     {"tool_version", m.tool_version},
                     {"seed", m.seed},
                     {"started", m.started},
                     {"finished", m.finished}};
}

void from_json(const nlohmann::json& j, RunManifest& m) {
  m.run_id = j.at("run_id").get<std::string>();
  m.config_snapshot = j.at("config_snapshot").get<std::string>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.started = j.at("started").get<std::string>();
  m.finished = j.value("finished", "");
}

namespace {

std::string FormatUtc(const char* fmt) {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, fmt, &tm);
  return buf;
}

using Key = std::tuple<std::string, std::string, std::string, Setting, int>;

Key KeyOf(const ResultRecord& r) {
  return {r.run_id, r.task_id, r.model_tag, r.setting, r.sample_index};
}

std::string KeyText(const ResultRecord& r) {
  return r.run_id + "/" + r.task_id + "/" + r.model_tag + "/" +
         std::string(SettingName(r.setting)) + "/" +
         std::to_string(r.sample_index);
}

void SyncWrite(const fs::path& path, const std::string& data) {
  int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::kIoError,
                "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  std::size_t done = 0;
  while (done < data.size()) {
    ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::close(fd);
      throw Error(ErrorCode::kIoError,
                  "write to " + path.string() + ": " + std::strerror(err));
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    int err = errno;
    ::close(fd);
    throw Error(ErrorCode::kIoError,
                "fsync " + path.string() + ": " + std::strerror(err));
  }
  ::close(fd);
}

}  // namespace

std::string UtcNow() { return FormatUtc("%Y-%m-%dT%H:%M:%SZ"); }

std::string NewRunId() {
  std::random_device rd;
  char suffix[8];
  std::snprintf(suffix, sizeof suffix, "%06x", rd() & 0xFFFFFFu);
  return FormatUtc("%Y%m%dT%H%M%SZ") + "-" + suffix;
}

Store::Store(fs::path root) : root_(std::move(root)) {}

void Store::Init() const {
  std::error_code ec;
  fs::create_directories(root_ / "runs", ec);
  if (!ec) fs::create_directories(root_ / "reports", ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot initialize store " + root_.string() + ": " + ec.message());
  }
}

fs::path Store::run_dir(std::string_view run_id) const {
  return root_ / "runs" / std::string(run_id);
}

fs::path Store::report_dir(std::string_view run_id) const {
  return root_ / "reports" / std::string(run_id);
}

void Store::BeginRun(const RunManifest& manifest) const {
  Init();
  if (manifest.run_id.empty() || manifest.run_id.find('/') != std::string::npos ||
      manifest.run_id.starts_with('.')) {
    throw Error(ErrorCode::kInvalidArgument, "bad run id '" + manifest.run_id + "'");
  }
  fs::path dir = run_dir(manifest.run_id);
  std::error_code ec;
  if (!fs::create_directory(dir, ec)) {
    throw Error(ec ? ErrorCode::kIoError : ErrorCode::kDuplicateKey,
                "run " + manifest.run_id + " already exists in the store");
  }
  WriteFileAtomic(dir / "manifest.json", nlohmann::json(manifest).dump(2) + "\n");
  WriteFileAtomic(root_ / "runs" / "LATEST", manifest.run_id + "\n");
}

void Store::FinishRun(std::string_view run_id) const {
  RunManifest m = LoadRun(run_id);
  m.finished = UtcNow();
  WriteFileAtomic(run_dir(run_id) / "manifest.json", nlohmann::json(m).dump(2) + "\n");
}

RunManifest Store::LoadRun(std::string_view run_id) const {
  fs::path p = run_dir(run_id) / "manifest.json";
  if (!fs::exists(p)) {
    throw Error(ErrorCode::kIoError, "no run " + std::string(run_id) + " in " +
                                         root_.string());
  }
  try {
    return nlohmann::json::parse(ReadFile(p)).get<RunManifest>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIoError, p.string() + ": " + e.what());
  }
}

std::string Store::LatestRun() const {
  fs::path p = root_ / "runs" / "LATEST";
  if (!fs::exists(p)) {
    throw Error(ErrorCode::kIoError, root_.string() + " holds no run; run scan first");
  }
  return std::string(Trim(ReadFile(p)));
}

std::vector<ResultRecord> Store::ReadRecords() const {
  std::vector<ResultRecord> out;
  fs::path p = results_path();
  if (!fs::exists(p)) return out;
  std::string text = ReadFile(p);
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    ++line_no;
    if (nl == std::string::npos) {
      spdlog::warn("{}: ignoring truncated trailing line {}", p.string(), line_no);
      break;
    }
    std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    if (Trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<ResultRecord>());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kIoError,
                  p.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

int Store::AppendRecords(const std::vector<ResultRecord>& records) const {
  Init();
  std::set<Key> keys;
  for (const ResultRecord& r : ReadRecords()) keys.insert(KeyOf(r));
  std::string payload;
  for (const ResultRecord& r : records) {
    if (r.complete && !r.correct) {
      throw Error(ErrorCode::kInvalidArgument,
                  KeyText(r) + ": complete but not correct");
    }
    if (r.sample_index < 0) {
      throw Error(ErrorCode::kInvalidArgument, KeyText(r) + ": negative index");
    }
    if (!keys.insert(KeyOf(r)).second) {
      throw Error(ErrorCode::kDuplicateKey, KeyText(r));
    }
    payload += nlohmann::json(r).dump() + "\n";
  }
  if (payload.empty()) return 0;
  // A previous crash may have left a partial line. It never committed, so
  // cut it off before appending.
  fs::path p = results_path();
  if (fs::exists(p) && fs::file_size(p) > 0) {
    std::string text = ReadFile(p);
    if (text.back() != '\n') {
      std::size_t keep = text.rfind('\n');
      fs::resize_file(p, keep == std::string::npos ? 0 : keep + 1);
    }
  }
  SyncWrite(p, payload);
  return static_cast<int>(records.size());
}

bool RecordQuery::Matches(const ResultRecord& r) const {
  return (!run_id || *run_id == r.run_id) && (!task_id || *task_id == r.task_id) &&
         (!model_tag || *model_tag == r.model_tag) &&
         (!setting || *setting == r.setting);
}

std::vector<SampleStats> AggregateRecords(const std::vector<ResultRecord>& records,
                                          const RecordQuery& query) {
  std::map<std::tuple<std::string, std::string, Setting>,
           std::map<int, const ResultRecord*>>
      groups;
  for (const ResultRecord& r : records) {
    if (!query.Matches(r)) continue;
    auto& g = groups[{r.task_id, r.model_tag, r.setting}];
    if (!g.emplace(r.sample_index, &r).second) {
      throw Error(ErrorCode::kDuplicateKey, KeyText(r));
    }
  }
  if (groups.empty()) {
    throw Error(ErrorCode::kEmptySelection, "no result records match the query");
  }
  std::vector<SampleStats> out;
  std::string gaps;
  for (const auto& [key, samples] : groups) {
    const auto& [task, model, setting] = key;
    int n = samples.rbegin()->first + 1;
    std::vector<int> missing;
    for (int i = 0; i < n; ++i) {
      if (!samples.contains(i)) missing.push_back(i);
    }
    if (!missing.empty()) {
      std::string list;
      for (int i : missing) list += (list.empty() ? "" : ",") + std::to_string(i);
      gaps += (gaps.empty() ? "" : "; ") + task + "/" + model + "/" +
              std::string(SettingName(setting)) + " [" + list + "]";
      continue;
    }
    std::vector<SampleOutcome> per;
    for (const auto& [i, r] : samples) per.push_back({r->correct, r->complete});
    SampleStats s = MakeSampleStats(task, std::move(per));
    s.model_tag = model;
    s.setting = SettingName(setting);
    out.push_back(std::move(s));
  }
  if (!gaps.empty()) throw Error(ErrorCode::kMissingSample, gaps);
  return out;
}

std::vector<SampleStats> Aggregate(const Store& store, const RecordQuery& query) {
  return AggregateRecords(store.ReadRecords(), query);
}

}  // namespace mutspec
