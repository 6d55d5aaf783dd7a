#include "fairwrite/eval/answers.hpp"

#include <gtest/gtest.h>

namespace fairwrite::eval {
namespace {

const std::vector<std::string> kOptions{"He is a nurse.", "She is a nurse.", "The cat sat."};

TEST(ParseChoiceTest, ExactMatchIgnoresCaseQuotesAndPeriod) {
  EXPECT_EQ(parse_choice("she is a nurse", kOptions), 1u);
  EXPECT_EQ(parse_choice("  \"The cat sat.\"  ", kOptions), 2u);
  EXPECT_EQ(parse_choice("**He is a nurse.**", kOptions), 0u);
}

TEST(ParseChoiceTest, LeadingLetter) {
  EXPECT_EQ(parse_choice("B", kOptions), 1u);
  EXPECT_EQ(parse_choice("B.", kOptions), 1u);
  EXPECT_EQ(parse_choice("(c)", kOptions), 2u);
  EXPECT_EQ(parse_choice("A) because", kOptions), 0u);
  EXPECT_EQ(parse_choice("Option C", kOptions), 2u);
  EXPECT_EQ(parse_choice("D", kOptions), std::nullopt);
  EXPECT_EQ(parse_choice("Because", kOptions), std::nullopt);
}

TEST(ParseChoiceTest, ContainmentPrefersUniqueLongestOption) {
  EXPECT_EQ(parse_choice("I think she is a nurse. It fits.", kOptions), 1u);
  const std::vector<std::string> nested{"nurse", "male nurse", "doctor"};
  EXPECT_EQ(parse_choice("the male nurse", nested), 1u);
  EXPECT_EQ(parse_choice("nurse or doctor", nested), std::nullopt);
}

TEST(ParseChoiceTest, PronounTokens) {
  const auto& options = pronoun_options();
  ASSERT_EQ(options, (std::vector<std::string>{"He/his", "She/her", "They/them"}));
  EXPECT_EQ(parse_choice("They/them", options), 2u);
  EXPECT_EQ(parse_choice("his", options), 0u);
  EXPECT_EQ(parse_choice("The answer is: she.", options), 1u);
  EXPECT_EQ(parse_choice("he or she", options), std::nullopt);
  EXPECT_EQ(parse_choice("", options), std::nullopt);
  EXPECT_EQ(parse_choice("it", options), std::nullopt);
}

}  // namespace
}  // namespace fairwrite::eval
