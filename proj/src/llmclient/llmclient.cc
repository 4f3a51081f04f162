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

#include "mutspec/llmclient.h"

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <thread>

#include "mutspec/error.h"
#include "mutspec/text.h"

namespace mutspec {
namespace {

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, data.data(), data.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

void Netstring(std::string& out, std::string_view s) {
  out += std::to_string(s.size());
  out += ':';
  out += s;
  out += ',';
}

bool IsRetryable(const Error& e) {
  if (e.code() == ErrorCode::kTimeout) return true;
  if (const auto* http = dynamic_cast<const HttpError*>(&e)) {
    return http->status() >= 500 && http->status() <= 599;
  }
  return false;
}

}  // namespace

std::string RequestId(std::string_view system, std::string_view user) {
  std::string encoded;
  Netstring(encoded, system);
  Netstring(encoded, user);
  return Sha256Hex(encoded);
}

PromptRequest MakePromptRequest(std::string system, std::string user,
                                int max_output_chars,
                                double temperature_hint) {
  if (user.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "prompt user text is empty");
  }
  PromptRequest r;
  r.request_id = RequestId(system, user);
  r.system = std::move(system);
  r.user = std::move(user);
  r.max_output_chars = max_output_chars;
  r.temperature_hint = temperature_hint;
  return r;
}

std::string_view TransportModeName(TransportMode mode) {
  switch (mode) {
    case TransportMode::kLive:
      return "LIVE";
    case TransportMode::kRecord:
      return "RECORD";
    case TransportMode::kReplay:
      return "REPLAY";
  }
  return "REPLAY";
}

TransportMode ParseTransportMode(std::string_view name) {
  if (name == "LIVE") return TransportMode::kLive;
  if (name == "RECORD") return TransportMode::kRecord;
  if (name == "REPLAY") return TransportMode::kReplay;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown transport mode " + std::string(name));
}

void to_json(nlohmann::json& j, const PromptRequest& r) {
  j = nlohmann::json{{"system", r.system},
                     {"user", r.user},
                     {"max_output_chars", r.max_output_chars},
                     {"temperature_hint", r.temperature_hint}};
}

CompletionClient::CompletionClient(TransportConfig config,
                                   std::shared_ptr<HttpBackend> backend)
    : config_(std::move(config)), backend_(std::move(backend)) {
  if (config_.max_in_flight < 1) config_.max_in_flight = 1;
  sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

long long CompletionClient::requests_issued() const {
  std::lock_guard lock(mu_);
  return requests_issued_;
}

void CompletionClient::LoadTranscript() {
  // Caller holds mu_.
  if (transcript_loaded_) return;
  transcript_loaded_ = true;
  if (!std::filesystem::exists(config_.transcript_path)) return;
  std::string text = ReadFile(config_.transcript_path);
  int line_no = 0;
  for (const std::string& line : SplitLines(text)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
      transcript_[record.at("id").get<std::string>()] =
          record.at("response").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kIoError,
                  config_.transcript_path.string() + ":" +
                      std::to_string(line_no) + ": " + e.what());
    }
  }
}

void CompletionClient::AppendTranscript(const PromptRequest& request,
                                        const std::string& response) {
  nlohmann::json record{
      {"id", request.request_id}, {"request", request}, {"response", response}};
  std::lock_guard lock(append_mu_);
  if (config_.transcript_path.has_parent_path()) {
    std::filesystem::create_directories(config_.transcript_path.parent_path());
  }
  std::ofstream out(config_.transcript_path, std::ios::app | std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoError,
                "cannot append to " + config_.transcript_path.string());
  }
  out << record.dump() << '\n';
}

std::string CompletionClient::Complete(const PromptRequest& request) {
  if (config_.mode == TransportMode::kReplay) {
    std::lock_guard lock(mu_);
    LoadTranscript();
    auto it = transcript_.find(request.request_id);
    if (it == transcript_.end()) {
      throw Error(ErrorCode::kReplayMiss, request.request_id);
    }
    return it->second;
  }
  std::string response = CompleteLive(request);
  if (config_.mode == TransportMode::kRecord) {
    AppendTranscript(request, response);
  }
  return response;
}

std::string CompletionClient::CompleteLive(const PromptRequest& request) {
  const char* key = std::getenv(config_.auth_env_var.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorCode::kAuthMissing,
                "environment variable " + config_.auth_env_var + " is not set");
  }
  if (config_.endpoint.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no endpoint configured");
  }
  {
    std::unique_lock lock(mu_);
    slot_free_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
    ++in_flight_;
    ++requests_issued_;
    if (!backend_) backend_ = MakeDefaultHttpBackend();
  }
  struct SlotRelease {
    CompletionClient* self;
    ~SlotRelease() {
      {
        std::lock_guard lock(self->mu_);
        --self->in_flight_;
      }
      self->slot_free_.notify_one();
    }
  } release{this};

  nlohmann::json body{
      {"model", config_.model},
      {"messages",
       {{{"role", "system"}, {"content", request.system}},
        {{"role", "user"}, {"content", request.user}}}},
      {"max_tokens", std::max(1, request.max_output_chars / 4)},
      {"temperature", request.temperature_hint},
  };
  std::map<std::string, std::string> headers{
      {"Authorization", std::string("Bearer ") + key},
      {"Content-Type", "application/json"}};
  HttpResponse resp =
      backend_->Post(config_.endpoint, headers, body.dump(), config_.timeout_ms);
  if (resp.status < 200 || resp.status > 299) {
    throw HttpError(resp.status, resp.body.substr(0, 512));
  }
  try {
    auto parsed = nlohmann::json::parse(resp.body);
    return parsed.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw HttpError(resp.status, std::string("malformed response body: ") +
                                     e.what());
  }
}

std::string CompletionClient::CompleteWithRetry(const PromptRequest& request,
                                                int attempts, int backoff_ms) {
  if (attempts < 1) {
    throw Error(ErrorCode::kInvalidArgument, "attempts must be >= 1");
  }
  int delay = backoff_ms;
  for (int attempt = 1;; ++attempt) {
    try {
      return Complete(request);
    } catch (const Error& e) {
      if (!IsRetryable(e) || attempt == attempts) throw;
    }
    sleeper_(std::chrono::milliseconds(delay));
    delay *= 2;
  }
}

}  // namespace mutspec
