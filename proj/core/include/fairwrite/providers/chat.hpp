#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace fairwrite {

struct ChatMessage {
  std::string role;
  std::string content;
};

class ChatModel {
 public:
  virtual ~ChatModel() = default;

  /// Model text for a non-empty conversation.
  virtual std::string generate(std::span<const ChatMessage> messages) = 0;
  virtual const std::string& model_id() const = 0;

  std::string generate_user(std::string prompt);
};

/// Returns queued replies in order; an empty queue is a ProviderError.
class ScriptedChatModel : public ChatModel {
 public:
  explicit ScriptedChatModel(std::vector<std::string> replies, std::string model_id = "scripted");

  std::string generate(std::span<const ChatMessage> messages) override;
  const std::string& model_id() const override { return model_id_; }

  /// Every conversation received, in call order.
  std::vector<std::vector<ChatMessage>> transcript() const;

 private:
  mutable std::mutex mutex_;
  std::deque<std::string> replies_;
  std::vector<std::vector<ChatMessage>> transcript_;
  std::string model_id_;
};

/// Returns the final message's content verbatim.
class EchoChatModel : public ChatModel {
 public:
  explicit EchoChatModel(std::string model_id = "echo") : model_id_(std::move(model_id)) {}

  std::string generate(std::span<const ChatMessage> messages) override;
  const std::string& model_id() const override { return model_id_; }

 private:
  std::string model_id_;
};

/// Content-keyed replies, independent of call order, so concurrent batch runs
/// are reproducible. File format:
///
///   {"model_id": "...",
///    "rules": [{"contains": ["a", "b"], "reply": "..."}, ...],
///    "fallback": "error" | "echo" | {"reply": "..."}}
///
/// The first rule whose substrings all occur in the final message wins.
class RuleChatModel : public ChatModel {
 public:
  struct Rule {
    std::vector<std::string> contains;
    std::string reply;
  };
  enum class Fallback { kError, kEcho, kReply };

  RuleChatModel(std::vector<Rule> rules, Fallback fallback, std::string fallback_reply = {},
                std::string model_id = "rules");
  static std::unique_ptr<RuleChatModel> from_file(const std::filesystem::path& path);

  std::string generate(std::span<const ChatMessage> messages) override;
  const std::string& model_id() const override { return model_id_; }

  std::uint64_t calls() const noexcept { return calls_.load(); }

 private:
  std::vector<Rule> rules_;
  Fallback fallback_;
  std::string fallback_reply_;
  std::string model_id_;
  std::atomic<std::uint64_t> calls_{0};
};

}  // namespace fairwrite
