#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

#include "fairwrite/providers/chat.hpp"
#include "fairwrite/providers/classifier.hpp"
#include "fairwrite/providers/embedding.hpp"

namespace fairwrite {

/// Connection settings shared by every remote provider. The credential
/// itself never appears in config files; only the name of the environment
/// variable that holds it.
struct ProviderConfig {
  std::string endpoint_url;
  std::string auth_env_var;
  std::string model_id;
  int timeout_ms = 30000;
  int max_retries = 3;
  int max_concurrent_requests = 4;

  /// Throws ConfigError on out-of-range values or a malformed URL.
  void validate() const;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Timeouts (status 0 here), 429 and 5xx.
bool is_transient_status(int status);

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  /// Returns whatever status the server sent. Connection failures and
  /// timeouts throw a transient ProviderError.
  virtual HttpResponse post_json(const std::string& body) = 0;
};

/// cpp-httplib transport. http:// and https:// endpoints; bearer auth from
/// the configured environment variable; at most max_concurrent_requests
/// in flight.
class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(const ProviderConfig& config);
  HttpResponse post_json(const std::string& body) override;

 private:
  std::string origin_;
  std::string path_;
  std::string bearer_;
  int timeout_ms_;
  std::counting_semaphore<1024> slots_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{250};
  std::chrono::milliseconds max_delay{8000};
  std::uint64_t jitter_seed = 0x5eed;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// POSTs `body`, retrying transient failures with exponential backoff and
/// jitter. Returns the 2xx body. Non-transient statuses fail immediately.
std::string post_with_retries(HttpTransport& transport, const std::string& body,
                              const RetryPolicy& policy, const Sleeper& sleep = {});

/// Request/response field layout for an embedding endpoint. Defaults match
/// the common hosted-API shape {"model", "input": [...]} -> {"data": [{"embedding"}]}.
struct EmbeddingApiShape {
  std::string input_field = "input";
  /// none: send text; prefix: "instruction text"; pair: [instruction, text].
  std::string instruction_mode = "none";
  std::string vectors_pointer = "/data";
  std::string vector_field = "embedding";  // empty: items are bare arrays
  std::size_t max_batch = 64;
  std::size_t dim = 0;
};

struct ChatApiShape {
  std::string messages_field = "messages";
  std::string content_pointer = "/choices/0/message/content";
  std::optional<double> temperature = 0.0;
};

/// Text-classification endpoint: {"inputs": text} -> [{"label", "score"}, ...]
/// (optionally nested one level). Remote labels pass through `label_map`
/// (lowercased when unmapped); toxicity takes the score of `toxicity_label`
/// divided by `score_scale`.
struct ClassifierApiShape {
  std::string input_field = "inputs";
  std::string label_field = "label";
  std::string score_field = "score";
  std::map<std::string, std::string> label_map;
  std::string toxicity_label = "toxic";
  double score_scale = 1.0;
};

class HttpEmbedder : public Embedder {
 public:
  HttpEmbedder(ProviderConfig config, EmbeddingApiShape shape,
               std::shared_ptr<HttpTransport> transport = nullptr, Sleeper sleep = {});

  std::vector<Embedding> embed(std::span<const EmbeddingRequest> requests) override;
  const std::string& model_id() const override { return config_.model_id; }
  std::size_t dim() const override { return shape_.dim; }

 private:
  ProviderConfig config_;
  EmbeddingApiShape shape_;
  std::shared_ptr<HttpTransport> transport_;
  Sleeper sleep_;
};

class HttpChatModel : public ChatModel {
 public:
  HttpChatModel(ProviderConfig config, ChatApiShape shape,
                std::shared_ptr<HttpTransport> transport = nullptr, Sleeper sleep = {});

  std::string generate(std::span<const ChatMessage> messages) override;
  const std::string& model_id() const override { return config_.model_id; }

 private:
  ProviderConfig config_;
  ChatApiShape shape_;
  std::shared_ptr<HttpTransport> transport_;
  Sleeper sleep_;
};

class HttpClassifier : public Classifier {
 public:
  HttpClassifier(ClassifierKind kind, ProviderConfig config, ClassifierApiShape shape,
                 std::shared_ptr<HttpTransport> transport = nullptr, Sleeper sleep = {});

  Classification classify(const std::string& text, ClassifierKind kind) override;
  bool supports(ClassifierKind kind) const override { return kind == kind_; }

 private:
  ClassifierKind kind_;
  ProviderConfig config_;
  ClassifierApiShape shape_;
  std::shared_ptr<HttpTransport> transport_;
  Sleeper sleep_;
};

}  // namespace fairwrite
