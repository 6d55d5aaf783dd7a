#pragma once

#include <span>
#include <string_view>

namespace fairwrite::eval {

enum class StereoLabel { kStereotype, kAntiStereotype, kMeaningless };
enum class PronounCategory { kMale, kFemale, kNeutral };
enum class SentimentLabel { kPositive, kNegative, kNeutral };

std::string_view to_string(StereoLabel label);
std::string_view to_string(PronounCategory category);
std::string_view to_string(SentimentLabel label);

/// Accepts "stereotype", "anti_stereotype"/"anti-stereotype",
/// "meaningless"/"unrelated".
StereoLabel parse_stereo_label(std::string_view text);
SentimentLabel parse_sentiment_label(std::string_view text);

/// 100 * #stereotype / (#stereotype + #anti_stereotype). Meaningless picks do
/// not enter the ratio. Throws UndefinedMetric when the ratio has no
/// denominator.
double stereotype_score(std::span<const StereoLabel> choices);

/// before - after, signed.
double score_reduction(double before, double after);

struct PronounProportions {
  double male = 0.0;
  double female = 0.0;
  double neutral = 0.0;
};

/// Throws InvalidArgument on empty input.
PronounProportions pronoun_proportions(std::span<const PronounCategory> answers);

struct LabelProportions {
  double positive = 0.0;
  double negative = 0.0;
  double neutral() const noexcept { return 1.0 - positive - negative; }
};

/// Fractions over the whole list. Throws InvalidArgument on empty input.
LabelProportions label_proportions(std::span<const SentimentLabel> labels);

/// 100 * (mean(before) - mean(after)) / mean(before) for scores in [0, 1].
/// Throws InvalidArgument on empty or out-of-range input and UndefinedMetric
/// when mean(before) is zero.
double toxicity_reduction(std::span<const double> before, std::span<const double> after);

}  // namespace fairwrite::eval
