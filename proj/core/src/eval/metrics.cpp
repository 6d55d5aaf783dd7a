#include "fairwrite/eval/metrics.hpp"

#include <string>

#include "fairwrite/errors.hpp"

namespace fairwrite::eval {

std::string_view to_string(StereoLabel label) {
  switch (label) {
    case StereoLabel::kStereotype:
      return "stereotype";
    case StereoLabel::kAntiStereotype:
      return "anti_stereotype";
    case StereoLabel::kMeaningless:
      return "meaningless";
  }
  return "unknown";
}

std::string_view to_string(PronounCategory category) {
  switch (category) {
    case PronounCategory::kMale:
      return "male";
    case PronounCategory::kFemale:
      return "female";
    case PronounCategory::kNeutral:
      return "neutral";
  }
  return "unknown";
}

std::string_view to_string(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::kPositive:
      return "positive";
    case SentimentLabel::kNegative:
      return "negative";
    case SentimentLabel::kNeutral:
      return "neutral";
  }
  return "unknown";
}

StereoLabel parse_stereo_label(std::string_view text) {
  if (text == "stereotype") return StereoLabel::kStereotype;
  if (text == "anti_stereotype" || text == "anti-stereotype") return StereoLabel::kAntiStereotype;
  if (text == "meaningless" || text == "unrelated") return StereoLabel::kMeaningless;
  throw InvalidArgument("unknown StereoSet label '" + std::string(text) + "'");
}

SentimentLabel parse_sentiment_label(std::string_view text) {
  if (text == "positive") return SentimentLabel::kPositive;
  if (text == "negative") return SentimentLabel::kNegative;
  if (text == "neutral") return SentimentLabel::kNeutral;
  throw InvalidArgument("unknown sentiment label '" + std::string(text) + "'");
}

double stereotype_score(std::span<const StereoLabel> choices) {
  std::size_t stereotype = 0;
  std::size_t anti = 0;
  for (StereoLabel label : choices) {
    if (label == StereoLabel::kStereotype) ++stereotype;
    if (label == StereoLabel::kAntiStereotype) ++anti;
  }
  if (stereotype + anti == 0) {
    throw UndefinedMetric("stereotype score undefined: no stereotype or anti-stereotype choices");
  }
  return 100.0 * static_cast<double>(stereotype) / static_cast<double>(stereotype + anti);
}

double score_reduction(double before, double after) { return before - after; }

PronounProportions pronoun_proportions(std::span<const PronounCategory> answers) {
  if (answers.empty()) throw InvalidArgument("pronoun_proportions: empty answer list");
  std::size_t male = 0;
  std::size_t female = 0;
  for (PronounCategory c : answers) {
    if (c == PronounCategory::kMale) ++male;
    if (c == PronounCategory::kFemale) ++female;
  }
  const auto total = static_cast<double>(answers.size());
  const std::size_t neutral = answers.size() - male - female;
  return {static_cast<double>(male) / total, static_cast<double>(female) / total,
          static_cast<double>(neutral) / total};
}

LabelProportions label_proportions(std::span<const SentimentLabel> labels) {
  if (labels.empty()) throw InvalidArgument("label_proportions: empty label list");
  std::size_t positive = 0;
  std::size_t negative = 0;
  for (SentimentLabel l : labels) {
    if (l == SentimentLabel::kPositive) ++positive;
    if (l == SentimentLabel::kNegative) ++negative;
  }
  const auto total = static_cast<double>(labels.size());
  return {static_cast<double>(positive) / total, static_cast<double>(negative) / total};
}

namespace {

double mean_score(std::span<const double> scores, const char* which) {
  if (scores.empty()) {
    throw InvalidArgument(std::string("toxicity_reduction: empty '") + which + "' list");
  }
  long double sum = 0.0L;
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw InvalidArgument("toxicity_reduction: score " + std::to_string(s) + " outside [0, 1]");
    }
    sum += s;
  }
  return static_cast<double>(sum / static_cast<long double>(scores.size()));
}

}  // namespace

double toxicity_reduction(std::span<const double> before, std::span<const double> after) {
  const double mean_before = mean_score(before, "before");
  const double mean_after = mean_score(after, "after");
  if (mean_before == 0.0) {
    throw UndefinedMetric("toxicity reduction undefined: mean toxicity before rewrite is zero");
  }
  return 100.0 * (mean_before - mean_after) / mean_before;
}

}  // namespace fairwrite::eval
