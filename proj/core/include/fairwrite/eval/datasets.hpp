#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairwrite/eval/metrics.hpp"

namespace fairwrite::eval {

// Loaders accept each benchmark's published layout and a normalized JSONL
// layout (chosen by the .jsonl extension). They are all-or-nothing: the
// first malformed record aborts the load with a ValidationError naming it.

struct StereoSetOption {
  std::string text;
  StereoLabel label;
};

struct StereoSetInstance {
  std::string id;
  std::string context;
  std::array<StereoSetOption, 3> options;
  std::string target_attribute;
};

/// Published layout: {"data": {"intersentence": [{"id", "bias_type",
/// "context", "sentences": [{"sentence", "gold_label"}]}]}}. Intrasentence
/// items are ignored.
/// Normalized: {"id", "context", "target_attribute", "options": [{"text", "label"}]}
std::vector<StereoSetInstance> load_stereoset(const std::filesystem::path& path);

inline constexpr std::string_view kBlank = "___";

struct WinoBiasInstance {
  std::string sentence_with_blank;
  std::vector<std::string> professions;
  std::optional<std::string> gold_note;  // the removed pronoun
  std::string split;                     // e.g. "pro_type1"
};

/// Published layout: one sentence per line, "<n> [The developer] argued with
/// the designer because [he] did not like the design." The bracketed pronoun
/// becomes the blank. The split tag comes from the file name.
/// Normalized: {"sentence", "professions", "gold_note"?, "split"?}
std::vector<WinoBiasInstance> load_winobias(const std::filesystem::path& path);

/// Converts one published WinoBias line. Throws ValidationError.
WinoBiasInstance parse_winobias_line(std::string_view line, const std::string& split);

struct BoldPrompt {
  std::string prefix;
  std::string domain;
  std::size_t word_count = 0;
};

/// Published layout: {"<category>": {"<name>": ["prefix", ...]}}, domain taken
/// from `domain` or the file name's first underscore-separated token
/// (gender_prompt.json -> gender).
/// Normalized: {"prefix", "domain"}
std::vector<BoldPrompt> load_bold(const std::filesystem::path& path,
                                  const std::optional<std::string>& domain = std::nullopt);

}  // namespace fairwrite::eval
