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

#include <spdlog/spdlog.h>

#include <regex>

#include "mutspec/error.h"
#include "mutspec/pipeline.h"
#include "mutspec/process.h"
#include "mutspec/text.h"

namespace mutspec {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kRepairLogCap = 8 * 1024;

constexpr char kRepairSystemPrompt[] =
    "You fix project build and test environments. You are given the output "
    "of a failing check command and the project's configuration files. "
    "Reply with complete replacement contents for the configuration files "
    "you change, each introduced by a line of the form `=== FILE: <name> ===`. "
    "Do not change source or test files.";

std::string Tail(const std::string& s, std::size_t cap) {
  return s.size() <= cap ? s : s.substr(s.size() - cap);
}

struct CheckRun {
  bool passed = false;
  std::optional<int> exit_status;
  bool timed_out = false;
  std::string log;
};

CheckRun RunCheck(const fs::path& dir, const RunnerSpec& check) {
  ProcessResult r =
      RunProcess(*check.test_command, dir, check.env, check.timeout_ms);
  CheckRun out;
  out.exit_status = r.exit_status;
  out.timed_out = r.timed_out;
  out.passed = !r.timed_out && r.exit_status == 0;
  out.log = Tail(r.out + r.err, kRepairLogCap);
  return out;
}

std::string BuildPrompt(const fs::path& dir, const RunnerSpec& check,
                        const CheckRun& run,
                        const std::set<std::string>& allowlist) {
  std::string status = run.timed_out ? "timed out"
                       : run.exit_status
                           ? "exited with status " + std::to_string(*run.exit_status)
                           : "was killed by a signal";
  std::string user = "The check command `" + *check.test_command + "` " +
                     status + ".\n\nOutput:\n" + run.log;
  if (!run.log.ends_with('\n')) user += "\n";
  user += "\nConfiguration files you may replace:";
  for (const std::string& name : allowlist) user += " " + name;
  user += "\n\nCurrent contents:\n";
  for (const std::string& name : allowlist) {
    if (!fs::is_regular_file(dir / name)) continue;
    std::string text = ReadFile(dir / name);
    user += "\n=== FILE: " + name + " ===\n" + text;
    if (!text.ends_with('\n')) user += "\n";
  }
  return user;
}

}  // namespace

std::set<std::string> DefaultConfigAllowlist() {
  return {"Makefile",     "build.gradle",     "config.json",
          "environment.yml", "gradle.properties", "package.json",
          "pom.xml",      "pyproject.toml",   "requirements.txt",
          "settings.gradle", "setup.cfg",     "setup.py",
          "tox.ini"};
}

std::vector<FileEdit> ParseFileEdits(std::string_view response) {
  static const std::regex kHeader(R"(^\s*=== FILE: (.+?) ===\s*$)");
  std::vector<FileEdit> edits;
  std::vector<std::string> body;
  auto flush = [&] {
    if (edits.empty()) return;
    // Drop a code fence wrapped around the body.
    while (!body.empty() && Trim(body.back()).empty()) body.pop_back();
    if (!body.empty() && Trim(body.front()).starts_with("```") &&
        Trim(body.back()) == "```" && body.size() >= 2) {
      body.erase(body.begin());
      body.pop_back();
    }
    std::string text;
    for (const std::string& l : body) text += l + "\n";
    edits.back().text = std::move(text);
    body.clear();
  };
  for (const std::string& line : SplitLines(response)) {
    std::smatch m;
    if (std::regex_match(line, m, kHeader)) {
      flush();
      edits.push_back({std::string(Trim(m[1].str())), ""});
      continue;
    }
    if (!edits.empty()) body.push_back(line);
  }
  flush();
  return edits;
}

int RepairReport::accepted_edits() const {
  int n = 0;
  for (const RepairRound& r : rounds) {
    for (const RepairEdit& e : r.edits) n += e.accepted;
  }
  return n;
}

RepairReport EnvironmentRepairLoop(const fs::path& project_dir,
                                   const RunnerSpec& check,
                                   CompletionClient& client,
                                   const RepairOptions& options) {
  if (!check.test_command || check.test_command->empty()) {
    throw Error(ErrorCode::kInvalidArgument, "repair check has no command");
  }
  RepairReport report;
  CheckRun run = RunCheck(project_dir, check);
  report.rounds.push_back(RepairRound{0, run.passed, run.exit_status,
                                      run.timed_out, run.log, "", "", {}});
  for (int round = 1; !run.passed && round <= options.max_rounds; ++round) {
    PromptRequest req = MakePromptRequest(
        kRepairSystemPrompt, BuildPrompt(project_dir, check, run, options.allowlist),
        16000, 0.0);
    RepairRound rr;
    rr.round = round;
    rr.request_id = req.request_id;
    try {
      rr.response = client.CompleteWithRetry(req);
    } catch (const Error& e) {
      throw Error(ErrorCode::kClientError,
                  "repair round " + std::to_string(round) + ": " + e.what());
    }
    for (FileEdit& edit : ParseFileEdits(rr.response)) {
      RepairEdit re;
      re.file = edit.file;
      if (!options.allowlist.contains(edit.file)) {
        re.reason = Error(ErrorCode::kEditOutsideAllowlist, edit.file).what();
        spdlog::warn("repair round {}: {}", round, re.reason);
        rr.edits.push_back(std::move(re));
        continue;
      }
      fs::path target = project_dir / edit.file;
      std::string before =
          fs::is_regular_file(target) ? ReadFile(target) : std::string();
      re.diff = RenderUnifiedDiff(before, edit.text, "a/" + edit.file,
                                  "b/" + edit.file);
      WriteFileAtomic(target, edit.text);
      re.accepted = true;
      rr.edits.push_back(std::move(re));
    }
    run = RunCheck(project_dir, check);
    rr.check_passed = run.passed;
    rr.exit_status = run.exit_status;
    rr.timed_out = run.timed_out;
    rr.log_excerpt = run.log;
    report.rounds.push_back(std::move(rr));
  }
  report.success = run.passed;
  return report;
}

void to_json(nlohmann::json& j, const RepairReport& r) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const RepairRound& rr : r.rounds) {
    nlohmann::json edits = nlohmann::json::array();
    for (const RepairEdit& e : rr.edits) {
      edits.push_back({{"file", e.file},
                       {"accepted", e.accepted},
                       {"reason", e.reason},
                       {"diff", e.diff}});
    }
    rounds.push_back(
        {{"round", rr.round},
         {"passed", rr.check_passed},
         {"exit_status",
          rr.exit_status ? nlohmann::json(*rr.exit_status) : nlohmann::json()},
         {"timed_out", rr.timed_out},
         {"log", rr.log_excerpt},
         {"request_id", rr.request_id},
         {"response", rr.response},
         {"edits", edits}});
  }
  j = nlohmann::json{{"success", r.success},
                     {"accepted_edits", r.accepted_edits()},
                     {"rounds", rounds}};
}

}  // namespace mutspec
