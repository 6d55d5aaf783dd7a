#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace fairwrite {

enum class ClassifierKind { kToxicity, kRegard, kSentiment };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view text);

/// Regard/sentiment: label in {positive, negative, neutral} with confidence.
/// Toxicity: label "toxicity", score in [0, 1] (rendered as 0-100 in reports).
struct Classification {
  std::string label;
  double score = 0.0;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Classification classify(const std::string& text, ClassifierKind kind) = 0;
  virtual bool supports(ClassifierKind kind) const = 0;
};

/// Throws ProviderError if `c` is not a legal result for `kind`.
void check_classification(const Classification& c, ClassifierKind kind);

/// Labels looked up from a JSON file:
///
///   {"toxicity":  {"<text>": 0.12, ...},
///    "regard":    {"<text>": {"label": "positive", "score": 0.97}, ...},
///    "sentiment": {...}}
///
/// Kinds absent from the file are unsupported; unknown texts are NotFound.
class FixtureClassifier : public Classifier {
 public:
  explicit FixtureClassifier(const std::filesystem::path& path);
  FixtureClassifier(std::map<ClassifierKind, std::unordered_map<std::string, Classification>> table);

  Classification classify(const std::string& text, ClassifierKind kind) override;
  bool supports(ClassifierKind kind) const override { return table_.contains(kind); }

 private:
  std::map<ClassifierKind, std::unordered_map<std::string, Classification>> table_;
};

/// Dispatches each kind to its own backend.
class RoutingClassifier : public Classifier {
 public:
  void route(ClassifierKind kind, std::shared_ptr<Classifier> backend);

  Classification classify(const std::string& text, ClassifierKind kind) override;
  bool supports(ClassifierKind kind) const override;

 private:
  std::map<ClassifierKind, std::shared_ptr<Classifier>> routes_;
};

}  // namespace fairwrite
