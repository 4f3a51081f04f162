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

#ifndef MUTSPEC_INTERPRETER_H_
#define MUTSPEC_INTERPRETER_H_

#include <string>
#include <vector>

#include "mutspec/frontend.h"

// Tree-walking interpreter for the bundled subject language. It runs every
// `test` block of a set of files and reports through exit codes and output
// streams, exactly as an external test runner would:
//
//   exit 0   every test passed
//   exit 1   at least one test failed (assertion or halted by a guard)
//   exit 2   runtime error; the run stops at the first one
//
// A failing postcondition guard writes `POSTCOND_VIOLATION:<id>` to the
// error stream. Execution is charged one step per statement and expression;
// exhausting the budget stops the run and reports a timeout.
namespace mutspec::fixture {

struct ProgramFile {
  std::string path;
  std::string text;
};

struct RunOptions {
  long long max_steps = 1'000'000;  // <= 0 means unbounded
  int timeout_ms = 120000;          // wall-clock backstop; <= 0 unbounded
  bool collect_coverage = false;
  int max_call_depth = 1000;
};

struct RunResult {
  int exit_code = 0;
  bool timed_out = false;
  std::string out;
  std::string err;
  long long steps = 0;
  int tests_run = 0;
  int tests_failed = 0;
  // Statement line hits for every executable line of every file.
  CoverageTable coverage;
};

RunResult RunTests(const std::vector<ProgramFile>& files,
                   const RunOptions& options = {});

}  // namespace mutspec::fixture

#endif  // MUTSPEC_INTERPRETER_H_
