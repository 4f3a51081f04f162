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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <regex>

#include "mutspec/error.h"
#include "mutspec/llmclient.h"

namespace mutspec {
namespace {

std::atomic<long long> g_network_attempts{0};

class HttplibBackend : public HttpBackend {
 public:
  HttpResponse Post(const std::string& url,
                    const std::map<std::string, std::string>& headers,
                    const std::string& body, int timeout_ms) override {
    ++g_network_attempts;
    if (std::getenv("MUTSPEC_FORBID_NETWORK") != nullptr) {
      std::fprintf(stderr,
                   "fatal: network request to %s while "
                   "MUTSPEC_FORBID_NETWORK is set\n",
                   url.c_str());
      std::abort();
    }
    static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, kUrl)) {
      throw Error(ErrorCode::kInvalidArgument, "malformed endpoint " + url);
    }
    httplib::Client client(m[1].str());
    auto secs = timeout_ms / 1000;
    auto usecs = (timeout_ms % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers h;
    std::string content_type = "application/json";
    for (const auto& [k, v] : headers) {
      if (k == "Content-Type") {
        content_type = v;
      } else {
        h.emplace(k, v);
      }
    }
    std::string path = m[2].matched ? m[2].str() : "/";
    auto res = client.Post(path, h, body, content_type);
    if (!res) {
      if (res.error() == httplib::Error::Read ||
          res.error() == httplib::Error::Write ||
          res.error() == httplib::Error::ConnectionTimeout) {
        throw Error(ErrorCode::kTimeout, url + ": " + httplib::to_string(res.error()));
      }
      throw HttpError(0, url + ": " + httplib::to_string(res.error()));
    }
    return {res->status, res->body};
  }
};

}  // namespace

std::shared_ptr<HttpBackend> MakeDefaultHttpBackend() {
  return std::make_shared<HttplibBackend>();
}

long long NetworkAttemptCount() { return g_network_attempts.load(); }

}  // namespace mutspec
