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

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdint>
#include <cstdlib>

#include "mutspec/error.h"
#include "mutspec/pipeline.h"

namespace mutspec {

void from_json(const nlohmann::json& j, SelectionConfig& c) {
  c.min_comment_words = j.value("min_comment_words", c.min_comment_words);
  c.min_loc = j.value("min_loc", c.min_loc);
  c.min_cc = j.value("min_cc", c.min_cc);
  c.min_coverage = j.value("min_coverage", c.min_coverage);
  c.min_mutants = j.value("min_mutants", c.min_mutants);
  c.target_count = j.value("target_count", c.target_count);
  if (c.min_comment_words <= 0 || c.min_loc <= 0 || c.min_cc <= 0 ||
      c.min_mutants <= 0 || c.target_count < 0 || !(c.min_coverage > 0) ||
      c.min_coverage > 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "selection thresholds must be positive, coverage in (0, 1]");
  }
}

void to_json(nlohmann::json& j, const SelectionConfig& c) {
  j = nlohmann::json{{"min_comment_words", c.min_comment_words},
                     {"min_loc", c.min_loc},
                     {"min_cc", c.min_cc},
                     {"min_coverage", c.min_coverage},
                     {"min_mutants", c.min_mutants},
                     {"target_count", c.target_count}};
}

std::vector<MethodRecord> FilterCandidateMethods(
    const std::vector<MethodRecord>& records, const SelectionConfig& cfg) {
  std::vector<MethodRecord> kept;
  for (const MethodRecord& r : records) {
    if (!r.coverage) {
      spdlog::warn("{}: {}", r.method_id,
                   Error(ErrorCode::kCoverageAbsent, "no coverage, skipped")
                       .what());
      continue;
    }
    bool words = r.comment_words > cfg.min_comment_words;
    bool size = r.loc >= cfg.min_loc || r.cyclomatic >= cfg.min_cc;
    bool covered = *r.coverage >= cfg.min_coverage;
    if (words && size && covered) kept.push_back(r);
  }
  return kept;
}

std::vector<std::vector<double>> TrigramHashProvider::Embed(
    const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  for (const std::string& t : texts) {
    std::vector<double> v(kDims, 0.0);
    // Strings shorter than a trigram hash as a whole.
    std::size_t grams = t.size() >= 3 ? t.size() - 2 : (t.empty() ? 0 : 1);
    for (std::size_t i = 0; i < grams; ++i) {
      std::uint32_t h = 2166136261u;
      for (std::size_t k = i; k < std::min(i + 3, t.size()); ++k) {
        h ^= static_cast<unsigned char>(t[k]);
        h *= 16777619u;
      }
      v[h % kDims] += 1.0;
    }
    out.push_back(std::move(v));
  }
  return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string endpoint,
                                             std::string model,
                                             std::string auth_env_var,
                                             std::shared_ptr<HttpBackend> backend,
                                             int timeout_ms)
    : endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      auth_env_var_(std::move(auth_env_var)),
      backend_(backend ? std::move(backend) : MakeDefaultHttpBackend()),
      timeout_ms_(timeout_ms) {}

std::vector<std::vector<double>> HttpEmbeddingProvider::Embed(
    const std::vector<std::string>& texts) {
  const char* key = std::getenv(auth_env_var_.c_str());
  if (!key || !*key) {
    throw Error(ErrorCode::kProviderError, auth_env_var_ + " is not set");
  }
  nlohmann::json body{{"model", model_}, {"input", texts}};
  HttpResponse resp;
  try {
    resp = backend_->Post(endpoint_,
                          {{"Content-Type", "application/json"},
                           {"Authorization", std::string("Bearer ") + key}},
                          body.dump(), timeout_ms_);
  } catch (const Error& e) {
    throw Error(ErrorCode::kProviderError, e.what());
  }
  if (resp.status < 200 || resp.status >= 300) {
    throw Error(ErrorCode::kProviderError,
                "status " + std::to_string(resp.status));
  }
  std::vector<std::vector<double>> out;
  try {
    auto j = nlohmann::json::parse(resp.body);
    for (const auto& d : j.at("data")) {
      out.push_back(d.at("embedding").get<std::vector<double>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kProviderError,
                std::string("malformed response: ") + e.what());
  }
  if (out.size() != texts.size()) {
    throw Error(ErrorCode::kProviderError,
                "expected " + std::to_string(texts.size()) + " vectors, got " +
                    std::to_string(out.size()));
  }
  return out;
}

std::vector<std::vector<double>> EmbedHeaders(
    const std::vector<std::string>& headers, EmbeddingProvider& provider) {
  for (const std::string& h : headers) {
    if (h.empty()) throw Error(ErrorCode::kInvalidArgument, "empty header");
  }
  std::vector<std::vector<double>> vs = provider.Embed(headers);
  if (vs.size() != headers.size()) {
    throw Error(ErrorCode::kProviderError, provider.name() +
                                               " returned the wrong number of "
                                               "vectors");
  }
  for (std::size_t i = 0; i < vs.size(); ++i) {
    double norm = 0;
    for (double x : vs[i]) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::kProviderError,
                  provider.name() + ": degenerate vector for '" + headers[i] +
                      "'");
    }
    for (double& x : vs[i]) x /= norm;
  }
  return vs;
}

namespace {

double CosineDistance(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) dot += a[i] * b[i];
  return 1.0 - dot;
}

}  // namespace

std::vector<std::size_t> FarthestFirstSelect(
    const std::vector<std::vector<double>>& vectors, std::size_t count) {
  if (count > vectors.size()) {
    throw Error(ErrorCode::kCountExceedsPopulation,
                "count " + std::to_string(count) + " > population " +
                    std::to_string(vectors.size()));
  }
  std::vector<std::size_t> picked;
  if (count == 0) return picked;
  const std::size_t n = vectors.size();
  std::vector<bool> taken(n, false);
  std::vector<double> min_dist(n, INFINITY);
  std::size_t next = 0;
  while (true) {
    picked.push_back(next);
    taken[next] = true;
    if (picked.size() == count) break;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) {
        min_dist[i] = std::min(min_dist[i], CosineDistance(vectors[i], vectors[next]));
      }
    }
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i] && (!best || min_dist[i] > min_dist[*best])) best = i;
    }
    next = *best;
  }
  return picked;
}

}  // namespace mutspec
