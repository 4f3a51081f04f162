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

#include <algorithm>

#include "mutspec/mutgen.h"
#include "mutspec/text.h"

namespace mutspec {
namespace {

struct Lines {
  std::vector<std::string> lines;
  bool trailing_newline = true;
};

Lines Split(std::string_view text) {
  Lines l;
  l.lines = SplitLines(text);
  l.trailing_newline = text.empty() || text.back() == '\n';
  return l;
}

std::string Range(std::size_t start, std::size_t count) {
  // GNU convention: an empty range names the line before it.
  std::size_t shown = count == 0 ? start : start + 1;
  if (count == 1) return std::to_string(shown);
  return std::to_string(shown) + "," + std::to_string(count);
}

void Emit(std::string& out, char prefix, const Lines& src, std::size_t i) {
  out += prefix;
  out += src.lines[i];
  out += '\n';
  if (i + 1 == src.lines.size() && !src.trailing_newline) {
    out += "\\ No newline at end of file\n";
  }
}

}  // namespace

std::string RenderUnifiedDiff(std::string_view before, std::string_view after,
                              std::string_view before_name,
                              std::string_view after_name, int context) {
  if (before == after) return "";
  Lines a = Split(before);
  Lines b = Split(after);

  // Mutants touch one contiguous region, so one hunk bounded by the common
  // prefix and suffix describes the change exactly.
  std::size_t prefix = 0;
  while (prefix < a.lines.size() && prefix < b.lines.size() &&
         a.lines[prefix] == b.lines[prefix]) {
    ++prefix;
  }
  std::size_t suffix = 0;
  while (suffix < a.lines.size() - prefix && suffix < b.lines.size() - prefix &&
         a.lines[a.lines.size() - 1 - suffix] ==
             b.lines[b.lines.size() - 1 - suffix]) {
    ++suffix;
  }
  // A trailing-newline change alone still has to show the last line.
  if (a.trailing_newline != b.trailing_newline && suffix > 0) {
    --suffix;
  }
  if (prefix == a.lines.size() && prefix == b.lines.size() && prefix > 0) {
    --prefix;
  }

  std::size_t ctx = static_cast<std::size_t>(std::max(context, 0));
  std::size_t lead = std::min(ctx, prefix);
  std::size_t trail = std::min(ctx, suffix);
  std::size_t a_start = prefix - lead;
  std::size_t a_end = a.lines.size() - suffix + trail;
  std::size_t b_end = b.lines.size() - suffix + trail;
  std::size_t b_start = a_start;

  std::string out;
  out += "--- " + std::string(before_name) + "\n";
  out += "+++ " + std::string(after_name) + "\n";
  out += "@@ -" + Range(a_start, a_end - a_start) + " +" +
         Range(b_start, b_end - b_start) + " @@\n";
  for (std::size_t i = a_start; i < prefix; ++i) Emit(out, ' ', a, i);
  for (std::size_t i = prefix; i < a.lines.size() - suffix; ++i) {
    Emit(out, '-', a, i);
  }
  for (std::size_t i = prefix; i < b.lines.size() - suffix; ++i) {
    Emit(out, '+', b, i);
  }
  for (std::size_t i = b.lines.size() - suffix; i < b_end; ++i) {
    Emit(out, ' ', b, i);
  }
  return out;
}

std::string MutantDiff(const SourceUnit& unit, const Mutant& mutant) {
  std::string name = unit.path.empty() ? unit.unit_id : unit.path;
  return RenderUnifiedDiff(unit.text, mutant.rendered_text, "a/" + name,
                           "b/" + name);
}

}  // namespace mutspec
