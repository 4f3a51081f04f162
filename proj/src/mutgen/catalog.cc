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

#include <charconv>
#include <set>

#include "mutspec/error.h"
#include "mutspec/mutgen.h"
#include "mutspec/text.h"

namespace mutspec {
namespace {

std::optional<std::string> StepInteger(std::string_view payload, int delta) {
  std::int64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(payload.data(), payload.data() + payload.size(), value);
  if (ec != std::errc() || ptr != payload.data() + payload.size()) {
    return std::nullopt;
  }
  std::int64_t out = 0;
  if (__builtin_add_overflow(value, delta, &out)) return std::nullopt;
  if (out < 0) return std::nullopt;  // a bare literal cannot carry a sign
  return std::to_string(out);
}

}  // namespace

std::optional<std::string> RewriteRule::Rewrite(std::string_view payload) const {
  std::string text(payload);
  std::smatch m;
  if (!std::regex_match(text, m, *compiled)) return std::nullopt;
  std::optional<std::string> out;
  if (replacement == "@succ") {
    out = StepInteger(payload, 1);
  } else if (replacement == "@pred") {
    out = StepInteger(payload, -1);
  } else {
    out = m.format(replacement);
  }
  if (out && *out == payload) return std::nullopt;
  return out;
}

std::optional<std::size_t> MutationOperator::FirstRule(
    std::string_view payload) const {
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (rules[i].Rewrite(payload)) return i;
  }
  return std::nullopt;
}

Catalog ParseCatalog(const nlohmann::json& doc) {
  auto bad = [](const std::string& why) {
    return Error(ErrorCode::kInvalidArgument, "catalog: " + why);
  };
  if (!doc.is_array()) throw bad("top level must be a list");
  Catalog catalog;
  std::set<std::string> names;
  for (const auto& entry : doc) {
    MutationOperator op;
    try {
      op.name = entry.at("name").get<std::string>();
      for (const auto& k : entry.at("site_kinds")) {
        auto kind = ParseSpanKind(k.get<std::string>());
        if (!kind) throw bad(op.name + ": unknown site kind " + k.dump());
        op.site_kinds.insert(*kind);
      }
      for (const auto& r : entry.at("rules")) {
        RewriteRule rule;
        rule.pattern = r.at("pattern").get<std::string>();
        rule.replacement = r.at("replacement").get<std::string>();
        if (rule.pattern.empty()) throw bad(op.name + ": empty pattern");
        try {
          rule.compiled = std::make_shared<const std::regex>(
              rule.pattern, std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
          throw bad(op.name + ": pattern " + rule.pattern + ": " + e.what());
        }
        op.rules.push_back(std::move(rule));
      }
    } catch (const nlohmann::json::exception& e) {
      throw bad(e.what());
    }
    if (op.name.empty()) throw bad("operator without a name");
    if (op.site_kinds.empty()) throw bad(op.name + ": no site kinds");
    if (op.rules.empty()) throw bad(op.name + ": no rules");
    if (!names.insert(op.name).second) throw bad("duplicate operator " + op.name);
    catalog.push_back(std::move(op));
  }
  return catalog;
}

Catalog LoadCatalog(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                path.string() + ": " + e.what());
  }
  return ParseCatalog(doc);
}

const MutationOperator& FindOperator(const Catalog& catalog,
                                     std::string_view name) {
  for (const auto& op : catalog) {
    if (op.name == name) return op;
  }
  throw Error(ErrorCode::kUnknownOperator, std::string(name));
}

}  // namespace mutspec
