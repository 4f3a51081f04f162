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

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "mutspec/error.h"
#include "mutspec/llmclient.h"
#include "mutspec/text.h"

namespace mutspec {
namespace {

namespace fs = std::filesystem;

// Scripted wire: returns queued responses in order and records requests.
class FakeBackend : public HttpBackend {
 public:
  std::vector<HttpResponse> script;
  std::vector<std::string> bodies;
  std::map<std::string, std::string> last_headers;
  std::atomic<int> calls{0};
  std::atomic<int> in_flight{0};
  std::atomic<int> peak{0};
  int delay_ms = 0;
  bool throw_timeout = false;

  HttpResponse Post(const std::string&,
                    const std::map<std::string, std::string>& headers,
                    const std::string& body, int) override {
    int now = ++in_flight;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    if (delay_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    }
    int i = calls++;
    --in_flight;
    std::lock_guard lock(mu_);
    bodies.push_back(body);
    last_headers = headers;
    if (throw_timeout) throw Error(ErrorCode::kTimeout, "fake");
    if (script.empty()) return Ok("default");
    return script[std::min<std::size_t>(i, script.size() - 1)];
  }

  static HttpResponse Ok(const std::string& text) {
    nlohmann::json body{{"choices", {{{"message", {{"content", text}}}}}}};
    return {200, body.dump()};
  }

 private:
  std::mutex mu_;
};

class LlmClientTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mutspec-llm-" + std::to_string(::testing::UnitTest::GetInstance()
                                                ->random_seed()) +
            "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    setenv("MUTSPEC_TEST_KEY", "sekrit", 1);
  }
  void TearDown() override { fs::remove_all(dir_); }

  TransportConfig Live() {
    TransportConfig c;
    c.mode = TransportMode::kLive;
    c.endpoint = "http://127.0.0.1:9/v1/chat/completions";
    c.auth_env_var = "MUTSPEC_TEST_KEY";
    return c;
  }

  fs::path dir_;
};

TEST(RequestIdTest, FrozenValuesFromIndependentOracle) {
  // sha256 over netstrings, computed outside this codebase.
  EXPECT_EQ(RequestId("sys", "hello"),
            "73e502f98ecb0494355e6b457c99edf1cd04a74c4b02ea359405de596f11a1b7");
  EXPECT_EQ(RequestId("", "\xc3\xa9"),
            "544fa6a99be486522ba67826adcf9820309ac09a8029ec755979edae154cff71");
}

TEST(RequestIdTest, FieldBoundaryMatters) {
  EXPECT_NE(RequestId("ab", "c"), RequestId("a", "bc"));
  EXPECT_EQ(MakePromptRequest("s", "u").request_id, RequestId("s", "u"));
  EXPECT_THROW(MakePromptRequest("s", ""), Error);
}

TEST_F(LlmClientTest, ReplayHitAndMiss) {
  PromptRequest req = MakePromptRequest("sys", "mutate line 2");
  nlohmann::json rec{{"id", req.request_id},
                     {"request", req},
                     {"response", "if (n <= 0) {"}};
  WriteFileAtomic(dir_ / "t.jsonl", rec.dump() + "\n");
  TransportConfig c;
  c.mode = TransportMode::kReplay;
  c.transcript_path = dir_ / "t.jsonl";
  long long before = NetworkAttemptCount();
  CompletionClient client(c);
  EXPECT_EQ(client.Complete(req), "if (n <= 0) {");
  try {
    client.Complete(MakePromptRequest("sys", "other"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kReplayMiss);
  }
  EXPECT_EQ(NetworkAttemptCount(), before);
  EXPECT_EQ(client.requests_issued(), 0);
}

TEST_F(LlmClientTest, AuthMissingBeforeAnyNetwork) {
  TransportConfig c = Live();
  c.auth_env_var = "MUTSPEC_DEFINITELY_UNSET_VAR";
  auto backend = std::make_shared<FakeBackend>();
  CompletionClient client(c, backend);
  long long before = NetworkAttemptCount();
  try {
    client.Complete(MakePromptRequest("s", "u"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAuthMissing);
  }
  EXPECT_EQ(backend->calls, 0);
  EXPECT_EQ(NetworkAttemptCount(), before);
}

TEST_F(LlmClientTest, LiveSendsChatRequestWithBearer) {
  auto backend = std::make_shared<FakeBackend>();
  backend->script = {FakeBackend::Ok("answer")};
  CompletionClient client(Live(), backend);
  EXPECT_EQ(client.Complete(MakePromptRequest("S", "U")), "answer");
  auto body = nlohmann::json::parse(backend->bodies.at(0));
  EXPECT_EQ(body["messages"][0]["content"], "S");
  EXPECT_EQ(body["messages"][1]["role"], "user");
  EXPECT_EQ(backend->last_headers["Authorization"], "Bearer sekrit");
}

TEST_F(LlmClientTest, RetrySucceedsFirstTime) {
  auto backend = std::make_shared<FakeBackend>();
  CompletionClient client(Live(), backend);
  std::vector<long long> sleeps;
  client.set_sleeper([&](auto d) { sleeps.push_back(d.count()); });
  client.CompleteWithRetry(MakePromptRequest("s", "u"));
  EXPECT_EQ(backend->calls, 1);
  EXPECT_TRUE(sleeps.empty());
}

TEST_F(LlmClientTest, RetryBacksOffOn5xx) {
  auto backend = std::make_shared<FakeBackend>();
  backend->script = {{503, "busy"}, {503, "busy"}, FakeBackend::Ok("fine")};
  CompletionClient client(Live(), backend);
  std::vector<long long> sleeps;
  client.set_sleeper([&](auto d) { sleeps.push_back(d.count()); });
  EXPECT_EQ(client.CompleteWithRetry(MakePromptRequest("s", "u")), "fine");
  EXPECT_EQ(backend->calls, 3);
  EXPECT_EQ(sleeps, (std::vector<long long>{500, 1000}));
}

TEST_F(LlmClientTest, NoRetryOn4xx) {
  auto backend = std::make_shared<FakeBackend>();
  backend->script = {{400, "bad"}};
  CompletionClient client(Live(), backend);
  client.set_sleeper([](auto) {});
  try {
    client.CompleteWithRetry(MakePromptRequest("s", "u"));
    FAIL();
  } catch (const HttpError& e) {
    EXPECT_EQ(e.status(), 400);
  }
  EXPECT_EQ(backend->calls, 1);
}

TEST_F(LlmClientTest, TimeoutsExhaustAttempts) {
  auto backend = std::make_shared<FakeBackend>();
  backend->throw_timeout = true;
  CompletionClient client(Live(), backend);
  client.set_sleeper([](auto) {});
  try {
    client.CompleteWithRetry(MakePromptRequest("s", "u"), 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTimeout);
  }
  EXPECT_EQ(backend->calls, 4);
}

TEST_F(LlmClientTest, RecordThenReplayIsIdentical) {
  auto backend = std::make_shared<FakeBackend>();
  backend->script = {FakeBackend::Ok("one"), FakeBackend::Ok("two")};
  TransportConfig rec = Live();
  rec.mode = TransportMode::kRecord;
  rec.transcript_path = dir_ / "rec.jsonl";
  CompletionClient recorder(rec, backend);
  auto a = MakePromptRequest("s", "first");
  auto b = MakePromptRequest("s", "second");
  std::string ra = recorder.Complete(a);
  std::string rb = recorder.Complete(b);

  std::string transcript = ReadFile(rec.transcript_path);
  EXPECT_EQ(transcript.find("sekrit"), std::string::npos);

  TransportConfig rep;
  rep.mode = TransportMode::kReplay;
  rep.transcript_path = rec.transcript_path;
  CompletionClient replayer(rep);
  EXPECT_EQ(replayer.Complete(a), ra);
  EXPECT_EQ(replayer.Complete(b), rb);
}

TEST_F(LlmClientTest, InFlightRequestsAreBounded) {
  auto backend = std::make_shared<FakeBackend>();
  backend->delay_ms = 20;
  TransportConfig c = Live();
  c.max_in_flight = 2;
  CompletionClient client(c, backend);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      client.Complete(MakePromptRequest("s", "u" + std::to_string(i)));
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(backend->calls, 8);
  EXPECT_LE(backend->peak, 2);
  EXPECT_EQ(client.requests_issued(), 8);
}

TEST(TransportModeTest, NamesRoundTrip) {
  for (auto m : {TransportMode::kLive, TransportMode::kRecord,
                 TransportMode::kReplay}) {
    EXPECT_EQ(ParseTransportMode(TransportModeName(m)), m);
  }
  EXPECT_THROW(ParseTransportMode("CARRIER_PIGEON"), Error);
}

}  // namespace
}  // namespace mutspec
