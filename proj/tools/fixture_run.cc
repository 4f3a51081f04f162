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

// Standalone runner for fixture-language test files, so the harness can
// drive the interpreter as an external process.
//
//   fixture_run [--max-steps N] [--coverage FILE] file...

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "mutspec/error.h"
#include "mutspec/interpreter.h"
#include "mutspec/text.h"

int main(int argc, char** argv) {
  using namespace mutspec;
  fixture::RunOptions options;
  options.max_steps = 0;
  options.timeout_ms = 0;
  std::string coverage_path;
  std::vector<fixture::ProgramFile> files;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--max-steps" && i + 1 < argc) {
      options.max_steps = std::atoll(argv[++i]);
    } else if (arg == "--coverage" && i + 1 < argc) {
      coverage_path = argv[++i];
      options.collect_coverage = true;
    } else if (arg.starts_with("--")) {
      std::fprintf(stderr, "usage: fixture_run [--max-steps N] [--coverage FILE] file...\n");
      return 64;
    } else {
      try {
        files.push_back({arg, ReadFile(arg)});
      } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 66;
      }
    }
  }
  fixture::RunResult r = fixture::RunTests(files, options);
  std::fwrite(r.out.data(), 1, r.out.size(), stdout);
  std::fwrite(r.err.data(), 1, r.err.size(), stderr);
  if (!coverage_path.empty()) {
    WriteFileAtomic(coverage_path, RenderCoverageReport(r.coverage));
  }
  // Step exhaustion mirrors the conventional timeout status.
  return r.timed_out ? 124 : r.exit_code;
}
