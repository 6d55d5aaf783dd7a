#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>
#include <string>

namespace fairwrite::eval {

/// The fixed pronoun options, in male/female/neutral order.
const std::vector<std::string>& pronoun_options();

/// Maps a model's free-text answer to an option index. Tries, in order:
///   1. exact match (whitespace, quotes and a trailing period ignored;
///      case-insensitive),
///   2. a leading option letter ("B", "B.", "(B)", "B)", "Option B"),
///   3. containment: exactly one option text occurs in the answer, or for
///      slash-separated options ("He/his"), exactly one option has a token
///      that occurs as a word of the answer.
/// Returns nullopt when the answer is unparseable or ambiguous.
std::optional<std::size_t> parse_choice(std::string_view answer,
                                        const std::vector<std::string>& options);

}  // namespace fairwrite::eval
