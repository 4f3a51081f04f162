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

// Brute-force kill matrices for the fixture corpus, computed without the
// validate module: every mutant is applied by hand, plain-run through the
// interpreter to decide whether it is defective, then every (set, variant)
// pair is woven and run, and the outcome is read straight off the
// interpreter's exit code and the violation marker.
//
//   gen_kill_oracle <config.json> <postconds-dir> <out-dir>

#include <algorithm>
#include <filesystem>
#include <iostream>

#include "json.hpp"
#include "mutspec/frontend.h"
#include "mutspec/harness.h"
#include "mutspec/interpreter.h"
#include "mutspec/llmclient.h"
#include "mutspec/mutgen.h"
#include "mutspec/text.h"

namespace fs = std::filesystem;
using namespace mutspec;
using nlohmann::json;

namespace {

struct Unit {
  std::string path;
  std::string text;
  bool test = false;
};

std::vector<fixture::ProgramFile> Program(const std::vector<Unit>& corpus,
                                          const std::string& path,
                                          const std::string& text) {
  std::vector<fixture::ProgramFile> files{{path, text}};
  for (const Unit& u : corpus) {
    if (u.path != path) files.push_back({u.path, u.text});
  }
  return files;
}

int CellValue(const fixture::RunResult& r) {
  for (const std::string& line : SplitLines(r.err)) {
    if (line.rfind(kViolationMarker, 0) == 0) return 0;
  }
  return !r.timed_out && r.exit_code == 0 ? 1 : -1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: gen_kill_oracle <config.json> <postconds-dir> <out-dir>\n";
    return 2;
  }
  fs::path config_path = argv[1];
  fs::path base = fs::absolute(config_path).parent_path();
  json cfg = json::parse(ReadFile(config_path));
  fs::path corpus_dir = base / cfg.at("corpus").get<std::string>();
  Catalog catalog = LoadCatalog(base / cfg.at("catalog").get<std::string>());
  fixture::RunOptions opt;
  opt.max_steps = cfg.at("runner").value("max_steps", 1'000'000LL);
  opt.timeout_ms = 0;

  std::vector<Unit> corpus;
  for (const auto& e : fs::directory_iterator(corpus_dir)) {
    if (e.path().extension() != ".fx") continue;
    corpus.push_back({e.path().filename().string(), ReadFile(e.path()),
                      e.path().stem().string().ends_with("_test")});
  }
  std::sort(corpus.begin(), corpus.end(),
            [](const Unit& a, const Unit& b) { return a.path < b.path; });

  std::unique_ptr<CompletionClient> client;
  if (cfg.value("llm_mutation", false)) {
    TransportConfig t;
    t.mode = TransportMode::kReplay;
    t.transcript_path = base / cfg.at("transport").at("transcript").get<std::string>();
    client = std::make_unique<CompletionClient>(t);
  }

  std::vector<fs::path> set_files;
  for (const auto& e : fs::directory_iterator(argv[2])) set_files.push_back(e.path());
  std::sort(set_files.begin(), set_files.end());
  fs::create_directories(argv[3]);

  for (const fs::path& sf : set_files) {
    std::string task = sf.stem().string();
    std::vector<PostconditionSet> sets =
        json::parse(ReadFile(sf)).get<std::vector<PostconditionSet>>();
    std::string unit_stem = task.substr(0, task.find('.'));
    std::string method_name = task.substr(task.find('.') + 1);
    const Unit& home = *std::find_if(corpus.begin(), corpus.end(), [&](const Unit& u) {
      return u.path == unit_stem + ".fx";
    });
    SourceUnit unit = ParseUnit(home.text, kFixtureAdapterId, home.path);
    MethodRecord method;
    for (const MethodRecord& m : ExtractMethods(unit)) {
      if (m.name == method_name) method = m;
    }

    std::vector<Mutant> ms = GenerateOperatorMutants(unit, method, catalog);
    if (client) {
      auto llm = GenerateLlmMutants(unit, method, SelectLlmMutationTargets(unit, method),
                                    *client);
      ms.insert(ms.end(), llm.begin(), llm.end());
      MarkDuplicates(ms);
    }

    std::vector<std::string> ids{"original"};
    std::vector<std::string> texts{home.text};
    int operator_defective = 0;
    for (const Mutant& m : ms) {
      if (m.status != MutantStatus::kCandidate) continue;
      std::string text = home.text.substr(0, m.span.start) + m.replacement +
                         home.text.substr(m.span.end);
      if (text != m.rendered_text) {
        std::cerr << m.mutant_id << ": rendered text disagrees with its span\n";
        return 1;
      }
      fixture::RunResult plain = fixture::RunTests(Program(corpus, home.path, text), opt);
      if (plain.timed_out || plain.exit_code != 1) continue;
      ids.push_back(m.mutant_id);
      texts.push_back(text);
      operator_defective += m.scheme == MutationScheme::kOperator;
    }

    json cells = json::array();
    for (const PostconditionSet& s : sets) {
      json row = json::array();
      for (const std::string& text : texts) {
        SourceUnit v = ParseUnit(text, kFixtureAdapterId, home.path);
        MethodRecord vm;
        for (const MethodRecord& m : ExtractMethods(v)) {
          if (m.name == method_name) vm = m;
        }
        SourceUnit woven = Instrument(v, vm, s);
        row.push_back(CellValue(fixture::RunTests(Program(corpus, home.path, woven.text), opt)));
      }
      cells.push_back(row);
    }
    json sets_json = json::array();
    for (const PostconditionSet& s : sets) sets_json.push_back(s.set_id);
    json out{{"task", task}, {"sets", sets_json}, {"variants", ids}, {"cells", cells},
             {"operator_defective", operator_defective}};
    WriteFileAtomic(fs::path(argv[3]) / (task + ".json"), out.dump(1) + "\n");
    std::cout << task << ": " << ids.size() - 1 << " defective (" << operator_defective
              << " operator)\n";
  }
  return 0;
}
