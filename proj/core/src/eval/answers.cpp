#include "fairwrite/eval/answers.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <string>

namespace fairwrite::eval {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string normalize(std::string_view s) {
  std::string out = lower(s);
  auto strip = [&] {
    const auto b = out.find_first_not_of(" \t\r\n\"'`*");
    if (b == std::string::npos) {
      out.clear();
      return;
    }
    const auto e = out.find_last_not_of(" \t\r\n\"'`*");
    out = out.substr(b, e - b + 1);
  };
  strip();
  while (!out.empty() && out.back() == '.') {
    out.pop_back();
    strip();
  }
  return out;
}

std::set<std::string> words_of(std::string_view text) {
  std::set<std::string> words;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'') {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      words.insert(current);
      current.clear();
    }
  }
  if (!current.empty()) words.insert(current);
  return words;
}

std::optional<std::size_t> leading_letter(std::string_view answer, std::size_t option_count) {
  std::string text = normalize(answer);
  if (text.rfind("option ", 0) == 0) text = text.substr(7);
  if (text.rfind("answer: ", 0) == 0) text = text.substr(8);
  std::size_t pos = 0;
  bool parenthesized = false;
  if (pos < text.size() && text[pos] == '(') {
    parenthesized = true;
    ++pos;
  }
  if (pos >= text.size() || text[pos] < 'a' || text[pos] > 'z') return std::nullopt;
  const auto index = static_cast<std::size_t>(text[pos] - 'a');
  ++pos;
  if (parenthesized) {
    if (pos >= text.size() || text[pos] != ')') return std::nullopt;
  } else if (pos < text.size() && text[pos] != '.' && text[pos] != ')' && text[pos] != ':') {
    return std::nullopt;
  }
  if (index >= option_count) return std::nullopt;
  return index;
}

std::optional<std::size_t> unique_index(const std::vector<std::size_t>& hits) {
  if (hits.size() == 1) return hits.front();
  return std::nullopt;
}

}  // namespace

const std::vector<std::string>& pronoun_options() {
  static const std::vector<std::string> options{"He/his", "She/her", "They/them"};
  return options;
}

std::optional<std::size_t> parse_choice(std::string_view answer,
                                        const std::vector<std::string>& options) {
  const std::string normalized = normalize(answer);
  if (normalized.empty() || options.empty()) return std::nullopt;

  for (std::size_t i = 0; i < options.size(); ++i) {
    if (normalize(options[i]) == normalized) return i;
  }

  if (auto letter = leading_letter(answer, options.size())) return letter;

  // Containment of whole option texts. When one contained option is a
  // substring of another contained option, the longer one wins.
  std::vector<std::size_t> contained;
  for (std::size_t i = 0; i < options.size(); ++i) {
    const std::string option = normalize(options[i]);
    if (!option.empty() && normalized.find(option) != std::string::npos) contained.push_back(i);
  }
  if (contained.size() > 1) {
    std::vector<std::size_t> maximal;
    for (std::size_t i : contained) {
      const std::string a = normalize(options[i]);
      const bool inside_other = std::any_of(contained.begin(), contained.end(), [&](std::size_t j) {
        const std::string b = normalize(options[j]);
        return j != i && b.size() > a.size() && b.find(a) != std::string::npos;
      });
      if (!inside_other) maximal.push_back(i);
    }
    contained = std::move(maximal);
  }
  if (!contained.empty()) return unique_index(contained);

  const auto answer_words = words_of(answer);
  std::vector<std::size_t> token_hits;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (options[i].find('/') == std::string::npos) continue;
    const auto option_words = words_of(options[i]);
    if (std::any_of(option_words.begin(), option_words.end(),
                    [&](const std::string& w) { return answer_words.contains(w); })) {
      token_hits.push_back(i);
    }
  }
  return unique_index(token_hits);
}

}  // namespace fairwrite::eval
