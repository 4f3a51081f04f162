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

#ifndef MUTSPEC_PROCESS_H_
#define MUTSPEC_PROCESS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace mutspec {

struct ProcessResult {
  bool timed_out = false;
  std::optional<int> exit_status;  // absent when killed by a signal
  std::string out;
  std::string err;
  long long duration_ms = 0;
};

// Runs `/bin/sh -c command` in its own process group with `cwd` as working
// directory and `env` layered over the inherited environment. The whole
// group is killed at the deadline. Throws Error(kSpawnFailure) when the
// shell cannot be started.
ProcessResult RunProcess(const std::string& command,
                         const std::filesystem::path& cwd,
                         const std::map<std::string, std::string>& env,
                         int timeout_ms);

// mkdtemp under the system temp directory; removed by the destructor.
class TempDir {
 public:
  explicit TempDir(std::string_view prefix = "mutspec");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace mutspec

#endif  // MUTSPEC_PROCESS_H_
