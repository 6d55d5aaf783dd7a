#include "fairwrite/providers/classifier.hpp"

#include <nlohmann/json.hpp>

#include "fairwrite/errors.hpp"
#include "fairwrite/util/files.hpp"

namespace fairwrite {

using json = nlohmann::json;

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kToxicity:
      return "toxicity";
    case ClassifierKind::kRegard:
      return "regard";
    case ClassifierKind::kSentiment:
      return "sentiment";
  }
  return "unknown";
}

ClassifierKind parse_classifier_kind(std::string_view text) {
  if (text == "toxicity") return ClassifierKind::kToxicity;
  if (text == "regard") return ClassifierKind::kRegard;
  if (text == "sentiment") return ClassifierKind::kSentiment;
  throw InvalidArgument("unknown classifier kind '" + std::string(text) + "'");
}

void check_classification(const Classification& c, ClassifierKind kind) {
  if (!(c.score >= 0.0 && c.score <= 1.0)) {
    throw ProviderError(std::string(to_string(kind)) + " score " + std::to_string(c.score) +
                        " outside [0, 1]");
  }
  if (kind == ClassifierKind::kToxicity) {
    if (c.label != "toxicity") {
      throw ProviderError("toxicity result must carry label 'toxicity', got '" + c.label + "'");
    }
    return;
  }
  if (c.label != "positive" && c.label != "negative" && c.label != "neutral") {
    throw ProviderError("unknown " + std::string(to_string(kind)) + " label '" + c.label + "'");
  }
}

FixtureClassifier::FixtureClassifier(
    std::map<ClassifierKind, std::unordered_map<std::string, Classification>> table)
    : table_(std::move(table)) {}

FixtureClassifier::FixtureClassifier(const std::filesystem::path& path) {
  json root;
  try {
    root = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError(path.string() + ": expected an object");
  for (const auto& [kind_name, texts] : root.items()) {
    ClassifierKind kind;
    try {
      kind = parse_classifier_kind(kind_name);
    } catch (const InvalidArgument& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    if (!texts.is_object()) {
      throw ConfigError(path.string() + ": '" + kind_name + "' must map texts to results");
    }
    auto& table = table_[kind];
    for (const auto& [text, value] : texts.items()) {
      Classification c;
      if (kind == ClassifierKind::kToxicity && value.is_number()) {
        c = {"toxicity", value.get<double>()};
      } else if (value.is_object() && value.contains("score") && value["score"].is_number()) {
        c.score = value["score"].get<double>();
        c.label = kind == ClassifierKind::kToxicity ? value.value("label", std::string("toxicity"))
                                                    : value.value("label", std::string());
      } else {
        throw ConfigError(path.string() + ": bad " + kind_name + " entry for \"" + text + "\"");
      }
      try {
        check_classification(c, kind);
      } catch (const ProviderError& e) {
        throw ConfigError(path.string() + ": " + e.what());
      }
      table.emplace(text, std::move(c));
    }
  }
}

Classification FixtureClassifier::classify(const std::string& text, ClassifierKind kind) {
  auto table = table_.find(kind);
  if (table == table_.end()) {
    throw ConfigError("fixture classifier has no '" + std::string(to_string(kind)) + "' table");
  }
  auto it = table->second.find(text);
  if (it == table->second.end()) {
    throw NotFound("no " + std::string(to_string(kind)) + " fixture for text \"" + text + "\"");
  }
  return it->second;
}

void RoutingClassifier::route(ClassifierKind kind, std::shared_ptr<Classifier> backend) {
  routes_[kind] = std::move(backend);
}

Classification RoutingClassifier::classify(const std::string& text, ClassifierKind kind) {
  auto it = routes_.find(kind);
  if (it == routes_.end() || !it->second->supports(kind)) {
    throw ConfigError("no classifier provider configured for '" + std::string(to_string(kind)) +
                      "'");
  }
  return it->second->classify(text, kind);
}

bool RoutingClassifier::supports(ClassifierKind kind) const {
  auto it = routes_.find(kind);
  return it != routes_.end() && it->second->supports(kind);
}

}  // namespace fairwrite
