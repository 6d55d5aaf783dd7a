#include "fairwrite/providers/http.hpp"

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <thread>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fairwrite {
namespace {

using json = nlohmann::json;

/// Loopback server answering POST / from a queue of canned responses and
/// recording every request body.
class FakeServer {
 public:
  FakeServer() {
    server_.Post("/v1/x", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex_);
      bodies_.push_back(req.body);
      auth_.push_back(req.get_header_value("Authorization"));
      HttpResponse next{200, "{}"};
      if (!queue_.empty()) {
        next = queue_.front();
        queue_.pop_front();
      }
      res.status = next.status;
      res.set_content(next.body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  void enqueue(int status, std::string body) {
    std::lock_guard lock(mutex_);
    queue_.push_back({status, std::move(body)});
  }
  std::vector<std::string> bodies() {
    std::lock_guard lock(mutex_);
    return bodies_;
  }
  std::vector<std::string> auth() {
    std::lock_guard lock(mutex_);
    return auth_;
  }

  ProviderConfig config() const {
    ProviderConfig config;
    config.endpoint_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1/x";
    config.model_id = "remote";
    config.timeout_ms = 5000;
    return config;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::mutex mutex_;
  std::deque<HttpResponse> queue_;
  std::vector<std::string> bodies_;
  std::vector<std::string> auth_;
};

struct SleepLog {
  std::vector<std::chrono::milliseconds> delays;
  Sleeper sleeper() {
    return [this](std::chrono::milliseconds d) { delays.push_back(d); };
  }
};

TEST(HttpRetryTest, TransientFailuresAreRetriedWithBackoff) {
  FakeServer server;
  server.enqueue(503, "busy");
  server.enqueue(503, "busy");
  server.enqueue(200, R"({"choices": [{"message": {"content": "hi"}}]})");
  SleepLog log;
  HttpChatModel llm(server.config(), {}, nullptr, log.sleeper());
  EXPECT_EQ(llm.generate_user("hello"), "hi");
  EXPECT_EQ(server.bodies().size(), 3u);
  ASSERT_EQ(log.delays.size(), 2u);
  // Equal jitter: [base/2, base] then [base, 2 base].
  EXPECT_GE(log.delays[0].count(), 125);
  EXPECT_LE(log.delays[0].count(), 250);
  EXPECT_GE(log.delays[1].count(), 250);
  EXPECT_LE(log.delays[1].count(), 500);
}

TEST(HttpRetryTest, ClientErrorsFailImmediately) {
  FakeServer server;
  server.enqueue(400, "bad request");
  SleepLog log;
  HttpChatModel llm(server.config(), {}, nullptr, log.sleeper());
  try {
    llm.generate_user("hello");
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_FALSE(e.transient());
    EXPECT_NE(std::string(e.what()).find("HTTP 400"), std::string::npos);
  }
  EXPECT_EQ(server.bodies().size(), 1u);
  EXPECT_TRUE(log.delays.empty());
}

TEST(HttpRetryTest, RetriesAreBounded) {
  FakeServer server;
  for (int i = 0; i < 10; ++i) server.enqueue(429, "slow down");
  SleepLog log;
  ProviderConfig config = server.config();
  config.max_retries = 2;
  HttpChatModel llm(config, {}, nullptr, log.sleeper());
  EXPECT_THROW(llm.generate_user("x"), ProviderError);
  EXPECT_EQ(server.bodies().size(), 3u);
}

TEST(HttpRetryTest, UnreachableHostIsProviderError) {
  ProviderConfig config;
  config.endpoint_url = "http://127.0.0.1:1/none";
  config.model_id = "m";
  config.timeout_ms = 500;
  config.max_retries = 1;
  SleepLog log;
  HttpChatModel llm(config, {}, nullptr, log.sleeper());
  EXPECT_THROW(llm.generate_user("x"), ProviderError);
  EXPECT_EQ(log.delays.size(), 1u);
}

TEST(HttpRetryTest, TransientClassification) {
  EXPECT_TRUE(is_transient_status(0));
  EXPECT_TRUE(is_transient_status(429));
  EXPECT_TRUE(is_transient_status(500));
  EXPECT_TRUE(is_transient_status(503));
  EXPECT_FALSE(is_transient_status(400));
  EXPECT_FALSE(is_transient_status(404));
}

TEST(HttpConfigTest, ValidationAndCredentials) {
  ProviderConfig config;
  config.endpoint_url = "ftp://x";
  config.model_id = "m";
  EXPECT_THROW(config.validate(), ConfigError);
  config.endpoint_url = "https://example.invalid/v1";
  EXPECT_NO_THROW(config.validate());
  config.max_concurrent_requests = 0;
  EXPECT_THROW(config.validate(), ConfigError);
  config.max_concurrent_requests = 4;
  config.auth_env_var = "FAIRWRITE_TEST_UNSET_VARIABLE";
  ::unsetenv("FAIRWRITE_TEST_UNSET_VARIABLE");
  try {
    HttpChatModel llm(config, {});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("FAIRWRITE_TEST_UNSET_VARIABLE"), std::string::npos);
  }
}

TEST(HttpShapeTest, ChatRequestAndBearer) {
  FakeServer server;
  server.enqueue(200, R"({"choices": [{"message": {"content": "ok"}}]})");
  ProviderConfig config = server.config();
  config.auth_env_var = "FAIRWRITE_TEST_TOKEN";
  ::setenv("FAIRWRITE_TEST_TOKEN", "s3cret", 1);
  HttpChatModel llm(config, {});
  const std::vector<ChatMessage> messages{{"system", "be brief"}, {"user", "hi"}};
  EXPECT_EQ(llm.generate(messages), "ok");
  const json body = json::parse(server.bodies().at(0));
  EXPECT_EQ(body["model"], "remote");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][1]["content"], "hi");
  EXPECT_EQ(server.auth().at(0), "Bearer s3cret");
}

TEST(HttpShapeTest, EmbeddingBatchesAndInstructionModes) {
  FakeServer server;
  server.enqueue(200, R"({"data": [{"embedding": [1, 0]}, {"embedding": [0, 1]}]})");
  server.enqueue(200, R"({"data": [{"embedding": [1, 1]}]})");
  EmbeddingApiShape shape;
  shape.dim = 2;
  shape.max_batch = 2;
  shape.instruction_mode = "pair";
  HttpEmbedder embedder(server.config(), shape);
  const std::vector<EmbeddingRequest> requests{{"a", "i"}, {"b", "i"}, {"c", ""}};
  const auto out = embedder.embed(requests);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[2], (Embedding{1.0, 1.0}));
  const auto bodies = server.bodies();
  ASSERT_EQ(bodies.size(), 2u);
  EXPECT_EQ(json::parse(bodies[0])["input"], json::parse(R"([["i", "a"], ["i", "b"]])"));

  server.enqueue(200, R"({"data": [{"embedding": [1, 0, 0]}]})");
  EXPECT_THROW(embedder.embed_one("d"), ProviderError);
  server.enqueue(200, "not json");
  EXPECT_THROW(embedder.embed_one("d"), ProviderError);

  shape.instruction_mode = "prefix";
  HttpEmbedder prefixed(server.config(), shape);
  server.enqueue(200, R"({"data": [{"embedding": [1, 0]}]})");
  prefixed.embed_one("text", "Represent this");
  EXPECT_EQ(json::parse(server.bodies().back())["input"][0], "Represent this text");
}

TEST(HttpShapeTest, ClassifierLabelsAndToxicity) {
  FakeServer server;
  ClassifierApiShape shape;
  shape.label_map = {{"LABEL_0", "negative"}};
  HttpClassifier regard(ClassifierKind::kRegard, server.config(), shape);
  server.enqueue(200, R"([[{"label": "LABEL_0", "score": 0.7}, {"label": "Positive", "score": 0.2}]])");
  const Classification c = regard.classify("t", ClassifierKind::kRegard);
  EXPECT_EQ(c.label, "negative");
  EXPECT_DOUBLE_EQ(c.score, 0.7);
  EXPECT_EQ(json::parse(server.bodies().back())["inputs"], "t");
  EXPECT_THROW(regard.classify("t", ClassifierKind::kToxicity), ConfigError);

  HttpClassifier toxicity(ClassifierKind::kToxicity, server.config(), {});
  server.enqueue(200, R"([{"label": "non-toxic", "score": 0.9}, {"label": "toxic", "score": 0.1}])");
  EXPECT_DOUBLE_EQ(toxicity.classify("t", ClassifierKind::kToxicity).score, 0.1);
  server.enqueue(200, R"([{"label": "non-toxic", "score": 0.9}])");
  EXPECT_THROW(toxicity.classify("t", ClassifierKind::kToxicity), ProviderError);
}

}  // namespace
}  // namespace fairwrite
