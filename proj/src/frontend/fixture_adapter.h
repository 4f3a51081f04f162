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

#ifndef MUTSPEC_SRC_FRONTEND_FIXTURE_ADAPTER_H_
#define MUTSPEC_SRC_FRONTEND_FIXTURE_ADAPTER_H_

#include "mutspec/frontend.h"

namespace mutspec {

inline constexpr std::string_view kImplPrefix = "__impl_";

// Non-blank, non-comment-only lines of a brace-delimited body.
int CountBodyLoc(std::string_view text, ByteRange body);

class FixtureAdapter : public SubjectAdapter {
 public:
  std::string_view id() const override;
  ParseOutput Parse(std::string_view text) const override;
  void CheckExpression(std::string_view expr) const override;
  std::optional<std::string> WeavingTemplate(
      const SourceUnit& unit, const MethodRecord& method) const override;
  std::string RenderSnapshot(std::size_t index,
                             std::string_view expr) const override;
  std::string SnapshotName(std::size_t index) const override;
  std::string RenderGuard(std::string_view cond_id,
                          std::string_view expr) const override;
  std::string RenderGuardEpilogue() const override;
  std::set<std::string> DefaultAllowlist() const override;
};

}  // namespace mutspec

#endif  // MUTSPEC_SRC_FRONTEND_FIXTURE_ADAPTER_H_
