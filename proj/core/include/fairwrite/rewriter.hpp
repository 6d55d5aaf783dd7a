#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairwrite/detector.hpp"
#include "fairwrite/lexicon.hpp"
#include "fairwrite/providers/chat.hpp"
#include "fairwrite/providers/embedding.hpp"
#include "fairwrite/resolver.hpp"

namespace fairwrite {

enum class TaskMode { kChatRewrite, kMultipleChoice, kPronounChoice };

std::string_view to_string(TaskMode mode);
TaskMode parse_task_mode(std::string_view text);
bool is_choice_mode(TaskMode mode) noexcept;

/// Number of options a choice-mode instruction must list.
inline constexpr std::size_t kChoiceOptionCount = 3;

struct RewriteTemplate {
  std::string id;
  std::string text;
};

/// One pinned template per task mode. Templates use the placeholders
/// {orientation} {unpleasant} {pleasant} {original} {options} {prompt};
/// {unpleasant}, {pleasant} and {original} are mandatory, and choice modes
/// also require {options}.
class TemplateSet {
 public:
  static TemplateSet defaults();

  /// Reads <mode>.txt files (chat_rewrite.txt, multiple_choice.txt,
  /// pronoun_choice.txt); modes without a file keep their default.
  static TemplateSet from_directory(const std::filesystem::path& dir);

  const RewriteTemplate& get(TaskMode mode) const;
  /// Throws ConfigError if the template lacks a mandatory placeholder.
  void set(TaskMode mode, RewriteTemplate tmpl);

 private:
  TemplateSet() = default;
  std::array<RewriteTemplate, 3> templates_;
};

/// Single-pass substitution: slot values are inserted verbatim and never
/// rescanned. `{name}` with an unknown lowercase name is a ConfigError;
/// other braces are literal.
std::string render_template(std::string_view text, const std::map<std::string, std::string>& slots);

/// "A. first\nB. second\nC. third"
std::string render_options(const std::vector<std::string>& options);

struct RewriteInstruction {
  std::string template_id;
  std::string rendered_text;
  std::map<std::string, std::string> slots;
};

/// Throws InvalidArgument when a choice mode is given anything other than
/// exactly kChoiceOptionCount options.
RewriteInstruction build_instruction(const BiasReport& report, const Resolution& resolution,
                                     TaskMode mode, const std::string& original,
                                     const std::optional<std::vector<std::string>>& options,
                                     const TemplateSet& templates = TemplateSet::defaults(),
                                     const std::string& prompt = {});

struct DebiasOutcome {
  std::string prompt;
  std::string original;
  BiasReport report;
  std::optional<Resolution> resolution;
  std::optional<RewriteInstruction> instruction;
  std::optional<std::string> rewritten;
  bool passed_through = true;
  std::string pass_reason;

  /// The rewritten text, or the original byte-for-byte when passed through.
  const std::string& effective() const noexcept { return rewritten ? *rewritten : original; }
};

/// Detect -> resolve -> instruct -> regenerate, with exactly one rewrite
/// round. Holds references; the lexicon, embedder and model must outlive it.
class DebiasPipeline {
 public:
  DebiasPipeline(const Lexicon& lexicon, DetectionConfig detection, Embedder& embedder,
                 ChatModel& llm, TemplateSet templates = TemplateSet::defaults(),
                 std::string response_instruction = {});

  /// Generates the original response from `prompt`, then debiases it.
  DebiasOutcome run(const std::string& prompt, std::string_view attribute, TaskMode mode,
                    const std::optional<std::vector<std::string>>& options = std::nullopt) const;

  /// Debiases an already-generated response.
  DebiasOutcome rewrite(const std::string& prompt, std::string original, std::string_view attribute,
                        TaskMode mode,
                        const std::optional<std::vector<std::string>>& options = std::nullopt) const;

  const Lexicon& lexicon() const noexcept { return lexicon_; }
  const DetectionConfig& detection() const noexcept { return detection_; }
  ChatModel& llm() const noexcept { return llm_; }

 private:
  const Lexicon& lexicon_;
  DetectionConfig detection_;
  Embedder& embedder_;
  ChatModel& llm_;
  TemplateSet templates_;
  std::string response_instruction_;
};

DebiasOutcome debias(const std::string& prompt, std::string_view attribute, TaskMode mode,
                     const Lexicon& lexicon, const DetectionConfig& config, Embedder& embedder,
                     ChatModel& llm,
                     const std::optional<std::vector<std::string>>& options = std::nullopt);

}  // namespace fairwrite
