#include "fairwrite/providers/chat.hpp"

#include <nlohmann/json.hpp>

#include "fairwrite/errors.hpp"
#include "fairwrite/util/files.hpp"

namespace fairwrite {

using json = nlohmann::json;

namespace {

void require_messages(std::span<const ChatMessage> messages) {
  if (messages.empty()) throw InvalidArgument("generate: empty message list");
}

}  // namespace

std::string ChatModel::generate_user(std::string prompt) {
  const ChatMessage message{"user", std::move(prompt)};
  return generate(std::span<const ChatMessage>(&message, 1));
}

ScriptedChatModel::ScriptedChatModel(std::vector<std::string> replies, std::string model_id)
    : replies_(replies.begin(), replies.end()), model_id_(std::move(model_id)) {}

std::string ScriptedChatModel::generate(std::span<const ChatMessage> messages) {
  require_messages(messages);
  std::lock_guard lock(mutex_);
  transcript_.emplace_back(messages.begin(), messages.end());
  if (replies_.empty()) {
    throw ProviderError("scripted chat model: no replies left");
  }
  std::string reply = std::move(replies_.front());
  replies_.pop_front();
  return reply;
}

std::vector<std::vector<ChatMessage>> ScriptedChatModel::transcript() const {
  std::lock_guard lock(mutex_);
  return transcript_;
}

std::string EchoChatModel::generate(std::span<const ChatMessage> messages) {
  require_messages(messages);
  return messages.back().content;
}

RuleChatModel::RuleChatModel(std::vector<Rule> rules, Fallback fallback, std::string fallback_reply,
                             std::string model_id)
    : rules_(std::move(rules)),
      fallback_(fallback),
      fallback_reply_(std::move(fallback_reply)),
      model_id_(std::move(model_id)) {}

std::unique_ptr<RuleChatModel> RuleChatModel::from_file(const std::filesystem::path& path) {
  json root;
  try {
    root = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  const std::string where = path.string();
  if (!root.is_object() || !root.contains("rules") || !root["rules"].is_array()) {
    throw ConfigError(where + ": expected an object with a 'rules' array");
  }
  std::vector<Rule> rules;
  for (std::size_t i = 0; i < root["rules"].size(); ++i) {
    const auto& node = root["rules"][i];
    const std::string rule_where = where + ": rules[" + std::to_string(i) + "]";
    if (!node.is_object() || !node.contains("reply") || !node["reply"].is_string()) {
      throw ConfigError(rule_where + ": needs a string 'reply'");
    }
    Rule rule;
    rule.reply = node["reply"].get<std::string>();
    if (auto it = node.find("contains"); it != node.end()) {
      if (it->is_string()) {
        rule.contains.push_back(it->get<std::string>());
      } else if (it->is_array()) {
        for (const auto& s : *it) {
          if (!s.is_string()) throw ConfigError(rule_where + ": 'contains' must hold strings");
          rule.contains.push_back(s.get<std::string>());
        }
      } else {
        throw ConfigError(rule_where + ": 'contains' must be a string or array");
      }
    }
    rules.push_back(std::move(rule));
  }

  Fallback fallback = Fallback::kError;
  std::string fallback_reply;
  if (auto it = root.find("fallback"); it != root.end()) {
    if (it->is_string() && *it == "echo") {
      fallback = Fallback::kEcho;
    } else if (it->is_string() && *it == "error") {
      fallback = Fallback::kError;
    } else if (it->is_object() && it->contains("reply") && (*it)["reply"].is_string()) {
      fallback = Fallback::kReply;
      fallback_reply = (*it)["reply"].get<std::string>();
    } else {
      throw ConfigError(where + ": 'fallback' must be \"error\", \"echo\" or {\"reply\": ...}");
    }
  }
  std::string model_id = root.value("model_id", std::string("rules"));
  return std::make_unique<RuleChatModel>(std::move(rules), fallback, std::move(fallback_reply),
                                         std::move(model_id));
}

std::string RuleChatModel::generate(std::span<const ChatMessage> messages) {
  require_messages(messages);
  calls_.fetch_add(1, std::memory_order_relaxed);
  const std::string& content = messages.back().content;
  for (const auto& rule : rules_) {
    bool matched = true;
    for (const auto& needle : rule.contains) {
      if (content.find(needle) == std::string::npos) {
        matched = false;
        break;
      }
    }
    if (matched) return rule.reply;
  }
  switch (fallback_) {
    case Fallback::kEcho:
      return content;
    case Fallback::kReply:
      return fallback_reply_;
    case Fallback::kError:
      break;
  }
  throw ProviderError("rule chat model: no rule matches the prompt \"" + content.substr(0, 80) +
                      (content.size() > 80 ? "...\"" : "\""));
}

}  // namespace fairwrite
