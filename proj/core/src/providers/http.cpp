#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "fairwrite/providers/http.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <random>
#include <thread>

#include "fairwrite/errors.hpp"

namespace fairwrite {

using json = nlohmann::json;

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint_url '" + url + "' has no scheme");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("endpoint_url '" + url + "' must be http:// or https://");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

RetryPolicy policy_for(const ProviderConfig& config) {
  RetryPolicy policy;
  policy.max_retries = config.max_retries;
  return policy;
}

std::shared_ptr<HttpTransport> default_transport(const ProviderConfig& config,
                                                 std::shared_ptr<HttpTransport> given) {
  config.validate();
  if (given) return given;
  return std::make_shared<HttplibTransport>(config);
}

json parse_body(const std::string& body, const std::string& who) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ProviderError(who + ": malformed response payload: " + e.what());
  }
}

const json& at_pointer(const json& root, const std::string& pointer, const std::string& who) {
  try {
    return root.at(json::json_pointer(pointer));
  } catch (const json::exception&) {
    throw ProviderError(who + ": response has no '" + pointer + "'");
  }
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

void ProviderConfig::validate() const {
  split_url(endpoint_url);
  if (model_id.empty()) throw ConfigError("provider model_id must be set");
  if (timeout_ms <= 0) throw ConfigError("timeout_ms must be positive");
  if (max_retries < 0 || max_retries > 10) throw ConfigError("max_retries must be in [0, 10]");
  if (max_concurrent_requests <= 0 || max_concurrent_requests > 1024) {
    throw ConfigError("max_concurrent_requests must be in [1, 1024]");
  }
}

bool is_transient_status(int status) { return status == 0 || status == 429 || status >= 500; }

HttplibTransport::HttplibTransport(const ProviderConfig& config)
    : timeout_ms_(config.timeout_ms), slots_(config.max_concurrent_requests) {
  std::tie(origin_, path_) = split_url(config.endpoint_url);
  if (!config.auth_env_var.empty()) {
    const char* secret = std::getenv(config.auth_env_var.c_str());
    if (secret == nullptr || *secret == '\0') {
      throw ConfigError("environment variable " + config.auth_env_var + " is not set");
    }
    bearer_ = secret;
  }
}

HttpResponse HttplibTransport::post_json(const std::string& body) {
  slots_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{slots_};

  httplib::Client client(origin_);
  const auto seconds = timeout_ms_ / 1000;
  const auto micros = (timeout_ms_ % 1000) * 1000;
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);
  httplib::Headers headers;
  if (!bearer_.empty()) headers.emplace("Authorization", "Bearer " + bearer_);

  auto result = client.Post(path_, headers, body, "application/json");
  if (!result) {
    throw ProviderError("POST " + origin_ + path_ + " failed: " + httplib::to_string(result.error()),
                        /*transient=*/true);
  }
  return {result->status, result->body};
}

std::string post_with_retries(HttpTransport& transport, const std::string& body,
                              const RetryPolicy& policy, const Sleeper& sleep) {
  std::mt19937_64 jitter(policy.jitter_seed ^ std::hash<std::string>{}(body));
  std::string last_error;
  for (int attempt = 0;; ++attempt) {
    try {
      HttpResponse response = transport.post_json(body);
      if (response.status >= 200 && response.status < 300) return std::move(response.body);
      last_error = "HTTP " + std::to_string(response.status) + ": " + response.body.substr(0, 200);
      if (!is_transient_status(response.status)) {
        throw ProviderError(last_error);
      }
    } catch (const ProviderError& e) {
      if (!e.transient()) throw;
      last_error = e.what();
    }
    if (attempt >= policy.max_retries) break;

    const auto exponential = policy.base_delay * (1LL << std::min(attempt, 20));
    const auto capped = std::min<std::chrono::milliseconds>(exponential, policy.max_delay);
    // Equal jitter: half fixed, half uniform.
    const auto half = capped.count() / 2;
    const auto delay = std::chrono::milliseconds(
        half + static_cast<long long>(jitter() % static_cast<std::uint64_t>(half + 1)));
    if (sleep) {
      sleep(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
  }
  throw ProviderError("request failed after " + std::to_string(policy.max_retries + 1) +
                      " attempt(s): " + last_error);
}

HttpEmbedder::HttpEmbedder(ProviderConfig config, EmbeddingApiShape shape,
                           std::shared_ptr<HttpTransport> transport, Sleeper sleep)
    : config_(std::move(config)), shape_(std::move(shape)), sleep_(std::move(sleep)) {
  if (shape_.dim == 0) throw ConfigError("HTTP embedder needs a declared dim");
  if (shape_.max_batch == 0) throw ConfigError("max_batch must be >= 1");
  if (shape_.instruction_mode != "none" && shape_.instruction_mode != "prefix" &&
      shape_.instruction_mode != "pair") {
    throw ConfigError("instruction_mode must be none, prefix or pair");
  }
  transport_ = default_transport(config_, std::move(transport));
}

std::vector<Embedding> HttpEmbedder::embed(std::span<const EmbeddingRequest> requests) {
  const std::string who = "embedding endpoint";
  std::vector<Embedding> out;
  out.reserve(requests.size());
  for (std::size_t start = 0; start < requests.size(); start += shape_.max_batch) {
    const auto batch = requests.subspan(start, std::min(shape_.max_batch, requests.size() - start));
    json inputs = json::array();
    for (const auto& request : batch) {
      if (request.text.empty()) throw InvalidArgument("cannot embed empty text");
      if (shape_.instruction_mode == "pair") {
        inputs.push_back(json::array({request.instruction, request.text}));
      } else if (shape_.instruction_mode == "prefix" && !request.instruction.empty()) {
        inputs.push_back(request.instruction + " " + request.text);
      } else {
        inputs.push_back(request.text);
      }
    }
    const json payload{{"model", config_.model_id}, {shape_.input_field, std::move(inputs)}};
    const json root = parse_body(
        post_with_retries(*transport_, payload.dump(), policy_for(config_), sleep_), who);
    const json& items = at_pointer(root, shape_.vectors_pointer, who);
    if (!items.is_array() || items.size() != batch.size()) {
      throw ProviderError(who + ": expected " + std::to_string(batch.size()) + " vectors");
    }
    for (const auto& item : items) {
      const json& values = shape_.vector_field.empty() ? item : item.value(shape_.vector_field, json());
      if (!values.is_array()) throw ProviderError(who + ": vector is not an array");
      std::vector<double> vector;
      vector.reserve(values.size());
      for (const auto& x : values) {
        if (!x.is_number()) throw ProviderError(who + ": non-numeric vector component");
        vector.push_back(x.get<double>());
      }
      if (vector.size() != shape_.dim) {
        throw ProviderError(who + ": returned dim " + std::to_string(vector.size()) +
                            ", manifest dim " + std::to_string(shape_.dim));
      }
      try {
        out.emplace_back(std::move(vector));
      } catch (const InvalidArgument& e) {
        throw ProviderError(who + ": " + e.what());
      }
    }
  }
  return out;
}

HttpChatModel::HttpChatModel(ProviderConfig config, ChatApiShape shape,
                             std::shared_ptr<HttpTransport> transport, Sleeper sleep)
    : config_(std::move(config)), shape_(std::move(shape)), sleep_(std::move(sleep)) {
  transport_ = default_transport(config_, std::move(transport));
}

std::string HttpChatModel::generate(std::span<const ChatMessage> messages) {
  if (messages.empty()) throw InvalidArgument("generate: empty message list");
  json list = json::array();
  for (const auto& message : messages) {
    list.push_back({{"role", message.role}, {"content", message.content}});
  }
  json payload{{"model", config_.model_id}, {shape_.messages_field, std::move(list)}};
  if (shape_.temperature) payload["temperature"] = *shape_.temperature;

  const std::string who = "chat endpoint";
  const json root =
      parse_body(post_with_retries(*transport_, payload.dump(), policy_for(config_), sleep_), who);
  const json& content = at_pointer(root, shape_.content_pointer, who);
  if (!content.is_string()) throw ProviderError(who + ": content is not a string");
  return content.get<std::string>();
}

HttpClassifier::HttpClassifier(ClassifierKind kind, ProviderConfig config, ClassifierApiShape shape,
                               std::shared_ptr<HttpTransport> transport, Sleeper sleep)
    : kind_(kind), config_(std::move(config)), shape_(std::move(shape)), sleep_(std::move(sleep)) {
  if (!(shape_.score_scale > 0.0)) throw ConfigError("score_scale must be positive");
  transport_ = default_transport(config_, std::move(transport));
}

Classification HttpClassifier::classify(const std::string& text, ClassifierKind kind) {
  if (kind != kind_) {
    throw ConfigError("classifier endpoint serves '" + std::string(to_string(kind_)) +
                      "', not '" + std::string(to_string(kind)) + "'");
  }
  const std::string who = std::string(to_string(kind)) + " classifier endpoint";
  const json payload{{shape_.input_field, text}};
  json root =
      parse_body(post_with_retries(*transport_, payload.dump(), policy_for(config_), sleep_), who);
  if (root.is_array() && !root.empty() && root.front().is_array()) root = root.front();
  if (!root.is_array() || root.empty()) throw ProviderError(who + ": expected a list of labels");

  std::vector<Classification> results;
  for (const auto& item : root) {
    if (!item.is_object() || !item.contains(shape_.label_field) ||
        !item[shape_.label_field].is_string() || !item.contains(shape_.score_field) ||
        !item[shape_.score_field].is_number()) {
      throw ProviderError(who + ": malformed label entry");
    }
    results.push_back({item[shape_.label_field].get<std::string>(),
                       item[shape_.score_field].get<double>() / shape_.score_scale});
  }

  Classification out;
  if (kind == ClassifierKind::kToxicity) {
    auto it = std::find_if(results.begin(), results.end(),
                           [&](const Classification& c) { return c.label == shape_.toxicity_label; });
    if (it == results.end()) {
      throw ProviderError(who + ": no '" + shape_.toxicity_label + "' label in response");
    }
    out = {"toxicity", it->score};
  } else {
    const auto best = std::max_element(
        results.begin(), results.end(),
        [](const Classification& a, const Classification& b) { return a.score < b.score; });
    auto mapped = shape_.label_map.find(best->label);
    out = {mapped != shape_.label_map.end() ? mapped->second : lowercase(best->label), best->score};
  }
  check_classification(out, kind);
  return out;
}

}  // namespace fairwrite
