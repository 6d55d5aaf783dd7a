#include "fairwrite/eval/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "fairwrite/errors.hpp"
#include "fairwrite/util/files.hpp"

namespace fairwrite::eval {

using json = nlohmann::json;

namespace {

bool is_jsonl(const std::filesystem::path& path) { return path.extension() == ".jsonl"; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(number);
    json node;
    try {
      node = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(where + ": " + e.what());
    }
    if (!node.is_object()) throw ValidationError(where + ": record must be an object");
    try {
      fn(node, where);
    } catch (const InvalidArgument& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
}

std::string need_string(const json& node, const char* key, const std::string& where) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_string()) {
    throw ValidationError(where + ": missing or non-string '" + key + "'");
  }
  return it->get<std::string>();
}

void check_stereoset(const StereoSetInstance& instance, const std::string& where) {
  if (instance.context.empty()) throw ValidationError(where + ": empty context");
  std::set<StereoLabel> labels;
  for (const auto& option : instance.options) {
    if (option.text.empty()) throw ValidationError(where + ": empty option text");
    labels.insert(option.label);
  }
  if (labels.size() != 3) throw ValidationError(where + ": option labels must be distinct");
}

std::size_t count_words(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  std::size_t n = 0;
  while (in >> word) ++n;
  return n;
}

std::size_t count_blanks(std::string_view text) {
  std::size_t n = 0;
  for (auto pos = text.find(kBlank); pos != std::string_view::npos;
       pos = text.find(kBlank, pos + kBlank.size())) {
    ++n;
  }
  return n;
}

const std::set<std::string>& pronouns() {
  static const std::set<std::string> words{"he",  "she",  "him",   "her",  "his",
                                           "hers", "they", "them", "their", "theirs"};
  return words;
}

std::string strip_article(std::string text) {
  for (std::string_view article : {"the ", "a ", "an "}) {
    if (lower(text).rfind(article, 0) == 0) return text.substr(article.size());
  }
  return text;
}

std::string split_from_filename(const std::filesystem::path& path) {
  const std::string name = lower(path.filename().string());
  std::string stance = name.find("anti") != std::string::npos  ? "anti"
                       : name.find("pro") != std::string::npos ? "pro"
                                                               : "";
  std::string type = name.find("type1") != std::string::npos   ? "type1"
                     : name.find("type2") != std::string::npos ? "type2"
                                                               : "";
  if (stance.empty() && type.empty()) return "all";
  if (stance.empty()) return type;
  if (type.empty()) return stance;
  return stance + "_" + type;
}

}  // namespace

std::vector<StereoSetInstance> load_stereoset(const std::filesystem::path& path) {
  std::vector<StereoSetInstance> out;
  if (is_jsonl(path)) {
    for_each_jsonl(path, [&](const json& node, const std::string& where) {
      StereoSetInstance instance;
      instance.id = node.value("id", std::to_string(out.size()));
      instance.context = need_string(node, "context", where);
      instance.target_attribute = node.value("target_attribute", std::string());
      const auto& options = node.at("options");
      if (!options.is_array() || options.size() != 3) {
        throw ValidationError(where + ": exactly 3 options required");
      }
      for (std::size_t i = 0; i < 3; ++i) {
        instance.options[i] = {need_string(options[i], "text", where),
                               parse_stereo_label(need_string(options[i], "label", where))};
      }
      check_stereoset(instance, where);
      out.push_back(std::move(instance));
    });
    return out;
  }

  json root;
  try {
    root = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  const json* items = nullptr;
  if (root.is_object() && root.contains("data") && root["data"].is_object() &&
      root["data"].contains("intersentence")) {
    items = &root["data"]["intersentence"];
  }
  if (items == nullptr || !items->is_array()) {
    throw ValidationError(path.string() + ": expected data.intersentence array");
  }
  for (std::size_t i = 0; i < items->size(); ++i) {
    const json& node = (*items)[i];
    const std::string where = path.string() + ": data.intersentence[" + std::to_string(i) + "]";
    try {
      if (!node.is_object()) throw ValidationError(where + ": must be an object");
      StereoSetInstance instance;
      instance.id = node.value("id", std::to_string(i));
      instance.context = need_string(node, "context", where);
      instance.target_attribute = node.value("bias_type", std::string());
      const auto& sentences = node.at("sentences");
      if (!sentences.is_array() || sentences.size() != 3) {
        throw ValidationError(where + ": exactly 3 sentences required");
      }
      for (std::size_t j = 0; j < 3; ++j) {
        instance.options[j] = {need_string(sentences[j], "sentence", where),
                               parse_stereo_label(need_string(sentences[j], "gold_label", where))};
      }
      check_stereoset(instance, where);
      out.push_back(std::move(instance));
    } catch (const InvalidArgument& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return out;
}

WinoBiasInstance parse_winobias_line(std::string_view line, const std::string& split) {
  std::string text = trim(line);
  // Leading sentence number.
  std::size_t digits = 0;
  while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits]))) ++digits;
  if (digits > 0 && digits < text.size() && text[digits] == ' ') text = trim(text.substr(digits));

  struct Span {
    std::size_t open, close;
    std::string inner;
  };
  std::vector<Span> spans;
  for (std::size_t pos = text.find('['); pos != std::string::npos; pos = text.find('[', pos + 1)) {
    const auto close = text.find(']', pos + 1);
    if (close == std::string::npos) throw ValidationError("unbalanced '[' in \"" + text + "\"");
    if (text.find('[', pos + 1) < close) {
      throw ValidationError("nested '[' in \"" + text + "\"");
    }
    spans.push_back({pos, close, text.substr(pos + 1, close - pos - 1)});
  }
  auto pronoun = std::find_if(spans.rbegin(), spans.rend(),
                              [](const Span& s) { return pronouns().contains(lower(trim(s.inner))); });
  if (pronoun == spans.rend()) {
    throw ValidationError("no bracketed pronoun in \"" + text + "\"");
  }

  WinoBiasInstance instance;
  instance.split = split;
  instance.gold_note = trim(pronoun->inner);
  for (const auto& span : spans) {
    if (&span == &*pronoun) continue;
    instance.professions.push_back(strip_article(trim(span.inner)));
  }
  // Replace the pronoun with the blank, then drop the remaining brackets.
  std::string sentence = text.substr(0, pronoun->open) + std::string(kBlank) +
                         text.substr(pronoun->close + 1);
  sentence.erase(std::remove_if(sentence.begin(), sentence.end(),
                                [](char c) { return c == '[' || c == ']'; }),
                 sentence.end());
  instance.sentence_with_blank = std::move(sentence);
  if (count_blanks(instance.sentence_with_blank) != 1) {
    throw ValidationError("sentence must contain exactly one blank: \"" +
                          instance.sentence_with_blank + "\"");
  }
  if (instance.professions.empty() || instance.professions.size() > 2) {
    throw ValidationError("expected 1-2 bracketed professions in \"" + text + "\"");
  }
  return instance;
}

std::vector<WinoBiasInstance> load_winobias(const std::filesystem::path& path) {
  std::vector<WinoBiasInstance> out;
  if (is_jsonl(path)) {
    for_each_jsonl(path, [&](const json& node, const std::string& where) {
      WinoBiasInstance instance;
      instance.sentence_with_blank = need_string(node, "sentence", where);
      if (count_blanks(instance.sentence_with_blank) != 1) {
        throw ValidationError(where + ": sentence must contain exactly one '___'");
      }
      const auto& professions = node.at("professions");
      if (!professions.is_array() || professions.empty() || professions.size() > 2) {
        throw ValidationError(where + ": 'professions' must list 1-2 strings");
      }
      for (const auto& p : professions) instance.professions.push_back(p.get<std::string>());
      if (node.contains("gold_note") && node["gold_note"].is_string()) {
        instance.gold_note = node["gold_note"].get<std::string>();
      }
      instance.split = node.value("split", std::string("all"));
      out.push_back(std::move(instance));
    });
    return out;
  }

  const std::string split = split_from_filename(path);
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse_winobias_line(line, split));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<BoldPrompt> load_bold(const std::filesystem::path& path,
                                  const std::optional<std::string>& domain) {
  std::vector<BoldPrompt> out;
  if (is_jsonl(path)) {
    for_each_jsonl(path, [&](const json& node, const std::string& where) {
      BoldPrompt prompt;
      prompt.prefix = need_string(node, "prefix", where);
      prompt.domain = domain ? *domain : need_string(node, "domain", where);
      if (trim(prompt.prefix).empty()) throw ValidationError(where + ": empty prefix");
      prompt.word_count = count_words(prompt.prefix);
      out.push_back(std::move(prompt));
    });
    return out;
  }

  std::string file_domain = domain.value_or(path.stem().string());
  if (!domain) file_domain = file_domain.substr(0, file_domain.find('_'));
  json root;
  try {
    root = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  if (!root.is_object()) throw ValidationError(path.string() + ": expected an object");
  for (const auto& [category, names] : root.items()) {
    if (!names.is_object()) {
      throw ValidationError(path.string() + ": '" + category + "' must map names to prompt lists");
    }
    for (const auto& [name, prompts] : names.items()) {
      const std::string where = path.string() + ": " + category + "." + name;
      if (!prompts.is_array()) throw ValidationError(where + ": expected a list of prompts");
      for (std::size_t i = 0; i < prompts.size(); ++i) {
        if (!prompts[i].is_string() || trim(prompts[i].get<std::string>()).empty()) {
          throw ValidationError(where + "[" + std::to_string(i) + "]: empty or non-string prompt");
        }
        BoldPrompt prompt{prompts[i].get<std::string>(), file_domain, 0};
        prompt.word_count = count_words(prompt.prefix);
        out.push_back(std::move(prompt));
      }
    }
  }
  return out;
}

}  // namespace fairwrite::eval
