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

#include <cstdio>
#include <map>

#include "mutspec/error.h"
#include "mutspec/store.h"
#include "mutspec/text.h"

namespace mutspec {

namespace fs = std::filesystem;

std::string FormatMetric(std::optional<double> v) {
  if (!v) return std::string(kUndefinedCell);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  // Never print "-0.000".
  if (std::string_view(buf) == "-0.000") return "0.000";
  return buf;
}

std::optional<double> ParseMetricCell(std::string_view cell) {
  if (cell == kUndefinedCell) return std::nullopt;
  std::string s(cell);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "not a metric cell: '" + s + "'");
  }
  return v;
}

std::vector<ReportRow> BuildReportRows(const std::vector<SampleStats>& stats,
                                       const std::vector<int>& k_values) {
  if (stats.empty()) throw Error(ErrorCode::kEmptySelection, "no stats to report");
  std::map<std::pair<std::string, std::string>, std::vector<SampleStats>> groups;
  for (const SampleStats& s : stats) groups[{s.model_tag, s.setting}].push_back(s);
  std::vector<ReportRow> rows;
  for (const auto& [key, group] : groups) {
    ReportRow row;
    row.model_tag = key.first;
    row.setting = key.second;
    row.tasks = static_cast<int>(group.size());
    row.metrics = BuildMetricReport(group, k_values);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string CsvLine(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += CsvField(cells[i]);
  }
  return line + "\n";
}

std::vector<std::string> RowCells(const ReportRow& r, const std::vector<int>& ks) {
  std::vector<std::string> cells{r.model_tag, r.setting, std::to_string(r.tasks)};
  for (int k : ks) {
    cells.push_back(FormatMetric(r.metrics.corr_at.at(k)));
    cells.push_back(FormatMetric(r.metrics.comp_at.at(k)));
    cells.push_back(FormatMetric(r.metrics.delta_at.at(k)));
    cells.push_back(FormatMetric(r.metrics.rho_at.at(k)));
  }
  cells.push_back(FormatMetric(r.metrics.c2c));
  return cells;
}

std::vector<std::string> Header(const std::vector<int>& ks) {
  std::vector<std::string> h{"model", "setting", "tasks"};
  for (int k : ks) {
    std::string s = std::to_string(k);
    h.push_back("corr@" + s);
    h.push_back("comp@" + s);
    h.push_back("delta@" + s);
    h.push_back("comp/corr@" + s);
  }
  h.push_back("c2c");
  return h;
}

// Display width, counting each UTF-8 sequence once.
std::size_t Width(std::string_view s) {
  std::size_t w = 0;
  for (char c : s) w += (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  return w;
}

}  // namespace

std::string RenderReportCsv(const std::vector<ReportRow>& rows,
                            const std::vector<int>& k_values) {
  std::string out = CsvLine(Header(k_values));
  for (const ReportRow& r : rows) out += CsvLine(RowCells(r, k_values));
  return out;
}

std::string RenderReportText(const std::vector<ReportRow>& rows,
                             const std::vector<int>& k_values) {
  std::vector<std::vector<std::string>> table{Header(k_values)};
  for (const ReportRow& r : rows) table.push_back(RowCells(r, k_values));
  std::vector<std::size_t> widths(table[0].size(), 0);
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      widths[i] = std::max(widths[i], Width(row[i]));
    }
  }
  std::string out;
  for (std::size_t r = 0; r < table.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < table[r].size(); ++i) {
      std::string pad(widths[i] - Width(table[r][i]), ' ');
      // Labels left, numbers right.
      line += i < 2 ? table[r][i] + pad : pad + table[r][i];
      if (i + 1 < table[r].size()) line += "  ";
    }
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : widths) total += w + 2;
      out += std::string(total - 2, '-') + "\n";
    }
  }
  return out;
}

std::string RenderGapsCsv(const std::vector<SampleStats>& stats) {
  std::vector<const SampleStats*> sorted;
  for (const SampleStats& s : stats) sorted.push_back(&s);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) {
    return std::tie(a->model_tag, a->setting, a->task_id) <
           std::tie(b->model_tag, b->setting, b->task_id);
  });
  std::string out = CsvLine({"model", "setting", "task_id", "n", "c_corr",
                             "c_comp", "method_gap"});
  for (const SampleStats* s : sorted) {
    out += CsvLine({s->model_tag, s->setting, s->task_id, std::to_string(s->n),
                    std::to_string(s->c_corr), std::to_string(s->c_comp),
                    FormatMetric(MethodLevelGap(*s))});
  }
  return out;
}

CsvTable ParseCsv(std::string_view text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n') {
      row.push_back(std::move(cell));
      cell.clear();
      lines.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (quoted) throw Error(ErrorCode::kInvalidArgument, "unterminated CSV quote");
  if (any) {
    row.push_back(std::move(cell));
    lines.push_back(std::move(row));
  }
  CsvTable t;
  if (lines.empty()) return t;
  t.header = std::move(lines[0]);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != t.header.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "CSV row " + std::to_string(i) + " has " +
                      std::to_string(lines[i].size()) + " cells, header has " +
                      std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(lines[i]));
  }
  return t;
}

fs::path EmitReport(const Store& store, std::string_view run_id,
                    const std::vector<SampleStats>& stats,
                    const std::vector<int>& k_values) {
  std::vector<ReportRow> rows = BuildReportRows(stats, k_values);
  fs::path dir = store.report_dir(run_id);
  WriteFileAtomic(dir / "report.txt", RenderReportText(rows, k_values));
  WriteFileAtomic(dir / "report.csv", RenderReportCsv(rows, k_values));
  WriteFileAtomic(dir / "gaps.csv", RenderGapsCsv(stats));
  return dir;
}

}  // namespace mutspec
