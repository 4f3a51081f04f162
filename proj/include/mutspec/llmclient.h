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

#ifndef MUTSPEC_LLMCLIENT_H_
#define MUTSPEC_LLMCLIENT_H_

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mutspec {

struct PromptRequest {
  std::string request_id;  // RequestId(system, user)
  std::string system;
  std::string user;
  int max_output_chars = 4000;
  double temperature_hint = 0.0;
};

// SHA-256 (lowercase hex) over the netstring encoding of system then user,
// so ids are identical across processes and platforms.
std::string RequestId(std::string_view system, std::string_view user);
PromptRequest MakePromptRequest(std::string system, std::string user,
                                int max_output_chars = 4000,
                                double temperature_hint = 0.0);

enum class TransportMode { kLive, kRecord, kReplay };
std::string_view TransportModeName(TransportMode mode);
TransportMode ParseTransportMode(std::string_view name);

struct TransportConfig {
  TransportMode mode = TransportMode::kReplay;
  std::string endpoint;  // LIVE / RECORD
  std::filesystem::path transcript_path;  // RECORD / REPLAY
  std::string auth_env_var = "MUTSPEC_API_KEY";
  std::string model = "default";
  int max_in_flight = 4;
  int timeout_ms = 60000;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Minimal POST seam so tests can script the wire without sockets.
class HttpBackend {
 public:
  virtual ~HttpBackend() = default;
  // Throws Error(kTimeout) on deadline, Error(kHttpError) on transport
  // failure. Non-2xx statuses are returned, not thrown.
  virtual HttpResponse Post(const std::string& url,
                            const std::map<std::string, std::string>& headers,
                            const std::string& body, int timeout_ms) = 0;
};

// cpp-httplib backed. When MUTSPEC_FORBID_NETWORK is set in the
// environment every call aborts the process, which makes any accidental
// network use in hermetic tests a hard failure.
std::shared_ptr<HttpBackend> MakeDefaultHttpBackend();
// Calls that reached the default backend in this process.
long long NetworkAttemptCount();

class CompletionClient {
 public:
  explicit CompletionClient(TransportConfig config,
                            std::shared_ptr<HttpBackend> backend = nullptr);

  // REPLAY is a pure transcript lookup; RECORD performs the LIVE exchange
  // and appends it to the transcript. Throws HttpError, Error(kTimeout),
  // Error(kReplayMiss), Error(kAuthMissing).
  std::string Complete(const PromptRequest& request);

  // Retries HTTP 5xx and timeouts only, doubling the delay after each
  // failed attempt.
  std::string CompleteWithRetry(const PromptRequest& request, int attempts = 3,
                                int backoff_ms = 500);

  void set_sleeper(std::function<void(std::chrono::milliseconds)> sleeper) {
    sleeper_ = std::move(sleeper);
  }
  const TransportConfig& config() const { return config_; }
  long long requests_issued() const;

 private:
  std::string CompleteLive(const PromptRequest& request);
  void LoadTranscript();
  void AppendTranscript(const PromptRequest& request,
                        const std::string& response);

  TransportConfig config_;
  std::shared_ptr<HttpBackend> backend_;
  std::function<void(std::chrono::milliseconds)> sleeper_;

  mutable std::mutex mu_;
  std::condition_variable slot_free_;
  int in_flight_ = 0;
  long long requests_issued_ = 0;
  bool transcript_loaded_ = false;
  std::map<std::string, std::string> transcript_;
  std::mutex append_mu_;
};

void to_json(nlohmann::json& j, const PromptRequest& r);

}  // namespace mutspec

#endif  // MUTSPEC_LLMCLIENT_H_
