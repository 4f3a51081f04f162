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

// Writes the REPLAY transcript for LLM mutation over a fixture corpus. The
// "model" is scripted: it adds one to the right side of the first comparison
// on the line, or swaps a string builtin, and otherwise echoes the line back
// (which the generator drops as a non-mutation).
//
//   gen_fixture_transcript <corpus-dir> <out.jsonl>

#include <algorithm>
#include <filesystem>
#include <iostream>

#include "json.hpp"
#include "mutspec/frontend.h"
#include "mutspec/mutgen.h"
#include "mutspec/text.h"

namespace fs = std::filesystem;
using namespace mutspec;

namespace {

std::string Scripted(const std::string& line) {
  // Off by one on the right operand of the first comparison.
  for (std::size_t p = 0; p < line.size(); ++p) {
    std::size_t width = 0;
    if (line.compare(p, 2, "<=") == 0 || line.compare(p, 2, ">=") == 0 ||
        line.compare(p, 2, "==") == 0 || line.compare(p, 2, "!=") == 0) {
      width = 2;
    } else if (line[p] == '<' || line[p] == '>') {
      width = 1;
    }
    if (width == 0) continue;
    std::size_t end = line.size();
    for (std::string_view stop : {" &&", " ||", ")"}) {
      std::size_t q = line.find(stop, p + width);
      if (q != std::string::npos) end = std::min(end, q);
    }
    std::string out = line;
    out.insert(end, " + 1");
    return out;
  }
  for (auto [from, to] : {std::pair{"upper(", "lower("}, std::pair{"trim(", "rtrim("}}) {
    std::size_t p = line.find(from);
    if (p != std::string::npos) {
      std::string out = line;
      out.replace(p, std::string_view(from).size(), to);
      return out;
    }
  }
  return line;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: gen_fixture_transcript <corpus-dir> <out.jsonl>\n";
    return 2;
  }
  fs::path corpus = argv[1];
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(corpus)) {
    std::string stem = e.path().stem().string();
    if (e.path().extension() == ".fx" && !stem.ends_with("_test")) {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::string out;
  int rows = 0;
  for (const fs::path& f : files) {
    SourceUnit unit = ParseUnit(ReadFile(f), kFixtureAdapterId,
                                fs::relative(f, corpus).generic_string());
    for (const MethodRecord& m : ExtractMethods(unit)) {
      for (const LlmTarget& t : SelectLlmMutationTargets(unit, m)) {
        PromptRequest req = BuildLlmMutationPrompt(unit, t);
        nlohmann::json rec{{"id", req.request_id},
                           {"request", req},
                           {"response", Scripted(std::string(Trim(t.original_line)))}};
        out += rec.dump() + "\n";
        ++rows;
      }
    }
  }
  WriteFileAtomic(argv[2], out);
  std::cout << rows << " exchanges\n";
  return 0;
}
