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

#ifndef MUTSPEC_TEXT_H_
#define MUTSPEC_TEXT_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mutspec {

// Half-open byte range [start, end) into a source text.
struct ByteRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool Contains(const ByteRange& other) const {
    return start <= other.start && other.end <= end;
  }
  bool Overlaps(const ByteRange& other) const {
    return start < other.end && other.start < end;
  }
  friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

// Byte offsets of every line start; line N (1-based) starts at result[N-1].
std::vector<std::size_t> LineStarts(std::string_view text);

// 1-based line containing `offset`.
int LineOfOffset(const std::vector<std::size_t>& line_starts,
                 std::size_t offset);

// Lines without their terminating '\n'. A trailing newline does not produce
// an extra empty line.
std::vector<std::string> SplitLines(std::string_view text);

std::string_view Trim(std::string_view s);
bool IsValidUtf8(std::string_view s);

std::string ReplaceRange(std::string_view text, ByteRange range,
                         std::string_view replacement);

std::string ReadFile(const std::filesystem::path& path);
// Writes via a temporary sibling and rename, so readers never observe a
// half-written file.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

}  // namespace mutspec

#endif  // MUTSPEC_TEXT_H_
