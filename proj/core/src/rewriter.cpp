#include "fairwrite/rewriter.hpp"

#include <algorithm>
#include <set>

#include "fairwrite/util/files.hpp"

namespace fairwrite {

namespace {

const std::set<std::string>& known_placeholders() {
  static const std::set<std::string> names{"orientation", "unpleasant", "pleasant",
                                           "original",    "options",    "prompt"};
  return names;
}

bool is_placeholder_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || c == '_';
  });
}

std::set<std::string> placeholders_in(std::string_view text) {
  std::set<std::string> found;
  for (std::size_t pos = text.find('{'); pos != std::string_view::npos;
       pos = text.find('{', pos + 1)) {
    const auto close = text.find('}', pos + 1);
    if (close == std::string_view::npos) break;
    const auto name = text.substr(pos + 1, close - pos - 1);
    if (is_placeholder_name(name)) found.emplace(name);
  }
  return found;
}

std::size_t mode_index(TaskMode mode) { return static_cast<std::size_t>(mode); }

constexpr std::array<TaskMode, 3> kAllModes{TaskMode::kChatRewrite, TaskMode::kMultipleChoice,
                                            TaskMode::kPronounChoice};

constexpr const char* kChatTemplate =
    "The response below shows an orientation toward the group \"{orientation}\" and is "
    "associated with the unpleasant characteristic \"{unpleasant}\".\n"
    "Rewrite the response so that it conveys \"{pleasant}\" instead of \"{unpleasant}\", while "
    "maintaining semantic integrity. Reply with the rewritten response only.\n"
    "\n"
    "Response:\n"
    "{original}";

constexpr const char* kMultipleChoiceTemplate =
    "Your earlier answer to the task below shows an orientation toward the group "
    "\"{orientation}\" and is associated with the unpleasant characteristic \"{unpleasant}\".\n"
    "Reconsider the options and choose the one that best fits the context, favoring "
    "\"{pleasant}\" over \"{unpleasant}\" while maintaining semantic integrity. Reply with the "
    "text of exactly one option.\n"
    "\n"
    "Task:\n"
    "{prompt}\n"
    "\n"
    "Earlier answer:\n"
    "{original}\n"
    "\n"
    "Options:\n"
    "{options}";

constexpr const char* kPronounChoiceTemplate =
    "Your earlier pronoun choice for the sentence below shows an orientation toward the group "
    "\"{orientation}\" and is associated with the unpleasant characteristic \"{unpleasant}\".\n"
    "Reconsider the options, favoring \"{pleasant}\" over \"{unpleasant}\" while maintaining "
    "semantic integrity. Avoid gender-stereotyped choices and prefer a gender-neutral pronoun "
    "unless the sentence itself determines the gender. Reply with exactly one option.\n"
    "\n"
    "Task:\n"
    "{prompt}\n"
    "\n"
    "Earlier answer:\n"
    "{original}\n"
    "\n"
    "Options:\n"
    "{options}";

}  // namespace

std::string_view to_string(TaskMode mode) {
  switch (mode) {
    case TaskMode::kChatRewrite:
      return "chat_rewrite";
    case TaskMode::kMultipleChoice:
      return "multiple_choice";
    case TaskMode::kPronounChoice:
      return "pronoun_choice";
  }
  return "unknown";
}

TaskMode parse_task_mode(std::string_view text) {
  for (TaskMode mode : kAllModes) {
    if (to_string(mode) == text) return mode;
  }
  throw InvalidArgument("unknown task mode '" + std::string(text) +
                        "' (expected chat_rewrite, multiple_choice or pronoun_choice)");
}

bool is_choice_mode(TaskMode mode) noexcept { return mode != TaskMode::kChatRewrite; }

TemplateSet TemplateSet::defaults() {
  TemplateSet set;
  set.set(TaskMode::kChatRewrite, {"chat_rewrite/v1", kChatTemplate});
  set.set(TaskMode::kMultipleChoice, {"multiple_choice/v1", kMultipleChoiceTemplate});
  set.set(TaskMode::kPronounChoice, {"pronoun_choice/v1", kPronounChoiceTemplate});
  return set;
}

TemplateSet TemplateSet::from_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("template directory '" + dir.string() + "' does not exist");
  }
  TemplateSet set = defaults();
  for (TaskMode mode : kAllModes) {
    const auto file = dir / (std::string(to_string(mode)) + ".txt");
    if (!std::filesystem::exists(file)) continue;
    std::string text = read_text_file(file);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    set.set(mode, {std::string(to_string(mode)) + "/file:" + sha256_hex(text).substr(0, 12),
                   std::move(text)});
  }
  return set;
}

const RewriteTemplate& TemplateSet::get(TaskMode mode) const { return templates_[mode_index(mode)]; }

void TemplateSet::set(TaskMode mode, RewriteTemplate tmpl) {
  const auto found = placeholders_in(tmpl.text);
  for (const auto& name : found) {
    if (!known_placeholders().contains(name)) {
      throw ConfigError("template '" + tmpl.id + "' uses unknown placeholder {" + name + "}");
    }
  }
  std::vector<std::string> required{"unpleasant", "pleasant", "original"};
  if (is_choice_mode(mode)) required.emplace_back("options");
  for (const auto& name : required) {
    if (!found.contains(name)) {
      throw ConfigError("template '" + tmpl.id + "' for " + std::string(to_string(mode)) +
                        " must contain {" + name + "}");
    }
  }
  templates_[mode_index(mode)] = std::move(tmpl);
}

std::string render_template(std::string_view text, const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(text.size() + 256);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, open - pos));
    const auto close = text.find('}', open + 1);
    const auto name = close == std::string_view::npos ? std::string_view{}
                                                      : text.substr(open + 1, close - open - 1);
    if (!is_placeholder_name(name)) {
      out.push_back('{');
      pos = open + 1;
      continue;
    }
    if (!known_placeholders().contains(std::string(name))) {
      throw ConfigError("unknown placeholder {" + std::string(name) + "}");
    }
    auto slot = slots.find(std::string(name));
    if (slot == slots.end()) {
      throw InvalidArgument("no value for placeholder {" + std::string(name) + "}");
    }
    out.append(slot->second);
    pos = close + 1;
  }
  return out;
}

std::string render_options(const std::vector<std::string>& options) {
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out.push_back(static_cast<char>('A' + i));
    out.append(". ").append(options[i]);
  }
  return out;
}

RewriteInstruction build_instruction(const BiasReport& report, const Resolution& resolution,
                                     TaskMode mode, const std::string& original,
                                     const std::optional<std::vector<std::string>>& options,
                                     const TemplateSet& templates, const std::string& prompt) {
  if (!report.orientation || !report.unpleasant) {
    throw InvalidArgument("build_instruction: report carries no detected bias");
  }
  std::map<std::string, std::string> slots{
      {"orientation", report.orientation->group_id},
      {"unpleasant", report.unpleasant->word},
      {"pleasant", resolution.pleasant_word},
      {"original", original},
      {"prompt", prompt},
      {"options", ""},
  };
  if (is_choice_mode(mode)) {
    if (!options || options->size() != kChoiceOptionCount) {
      throw InvalidArgument(std::string(to_string(mode)) + " needs exactly " +
                            std::to_string(kChoiceOptionCount) + " options, got " +
                            std::to_string(options ? options->size() : 0));
    }
    slots["options"] = render_options(*options);
  }
  const RewriteTemplate& tmpl = templates.get(mode);
  return RewriteInstruction{tmpl.id, render_template(tmpl.text, slots), std::move(slots)};
}

DebiasPipeline::DebiasPipeline(const Lexicon& lexicon, DetectionConfig detection,
                               Embedder& embedder, ChatModel& llm, TemplateSet templates,
                               std::string response_instruction)
    : lexicon_(lexicon),
      detection_(detection),
      embedder_(embedder),
      llm_(llm),
      templates_(std::move(templates)),
      response_instruction_(std::move(response_instruction)) {}

namespace {

void check_options(TaskMode mode, const std::optional<std::vector<std::string>>& options) {
  if (is_choice_mode(mode) && (!options || options->size() != kChoiceOptionCount)) {
    throw InvalidArgument(std::string(to_string(mode)) + " needs exactly " +
                          std::to_string(kChoiceOptionCount) + " options");
  }
}

std::string require_text(std::string text, const char* what) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ProviderError(std::string("model returned an empty ") + what);
  }
  return text;
}

}  // namespace

DebiasOutcome DebiasPipeline::run(const std::string& prompt, std::string_view attribute,
                                  TaskMode mode,
                                  const std::optional<std::vector<std::string>>& options) const {
  check_options(mode, options);
  lexicon_.attribute(attribute);
  std::string original = require_text(llm_.generate_user(prompt), "response");
  return rewrite(prompt, std::move(original), attribute, mode, options);
}

DebiasOutcome DebiasPipeline::rewrite(const std::string& prompt, std::string original,
                                      std::string_view attribute, TaskMode mode,
                                      const std::optional<std::vector<std::string>>& options) const {
  check_options(mode, options);
  BiasReport report =
      detect(original, attribute, lexicon_, detection_, embedder_, response_instruction_);
  DebiasOutcome outcome{prompt, std::move(original), std::move(report), std::nullopt,
                        std::nullopt, std::nullopt, true, {}};
  if (!outcome.report.orientation) {
    outcome.pass_reason = "no orientation";
    return outcome;
  }
  if (!outcome.report.unpleasant) {
    outcome.pass_reason = "no unpleasant characteristic";
    return outcome;
  }
  try {
    outcome.resolution = resolve(outcome.report, lexicon_, detection_);
  } catch (const DegenerateRepair& e) {
    outcome.pass_reason = std::string("no resolution: ") + e.what();
    return outcome;
  }
  outcome.instruction = build_instruction(outcome.report, *outcome.resolution, mode,
                                          outcome.original, options, templates_, prompt);
  outcome.rewritten = require_text(llm_.generate_user(outcome.instruction->rendered_text),
                                   "rewrite");
  outcome.passed_through = false;
  return outcome;
}

DebiasOutcome debias(const std::string& prompt, std::string_view attribute, TaskMode mode,
                     const Lexicon& lexicon, const DetectionConfig& config, Embedder& embedder,
                     ChatModel& llm, const std::optional<std::vector<std::string>>& options) {
  return DebiasPipeline(lexicon, config, embedder, llm).run(prompt, attribute, mode, options);
}

}  // namespace fairwrite
