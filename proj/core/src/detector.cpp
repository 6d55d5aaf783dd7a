#include "fairwrite/detector.hpp"

#include <string>

#include "fairwrite/providers/embedding.hpp"

namespace fairwrite {

void DetectionConfig::validate(bool allow_unreachable) const {
  auto check_epsilon = [&](double value, const char* name) {
    const double upper = allow_unreachable ? 2.0 : 1.0;
    if (!(value > 0.0 && value <= upper)) {
      throw ConfigError(std::string(name) + " must be in (0, " + (allow_unreachable ? "2" : "1") +
                        "], got " + std::to_string(value));
    }
  };
  check_epsilon(epsilon_orientation, "epsilon_orientation");
  check_epsilon(epsilon_unpleasant, "epsilon_unpleasant");
  if (!(delta_degenerate > 0.0 && delta_degenerate < 1.0)) {
    throw ConfigError("delta_degenerate must be in (0, 1), got " +
                      std::to_string(delta_degenerate));
  }
}

std::optional<Orientation> detect_orientation(const Embedding& response,
                                              const SensitiveAttribute& attribute,
                                              const DetectionConfig& config) {
  if (attribute.groups.empty()) {
    throw InvalidArgument("attribute '" + attribute.name + "' has no groups");
  }
  const std::size_t k = nearest_by(response, attribute.groups,
                                   [](const DemographicGroup& g) -> const Embedding& {
                                     return g.embedding;
                                   });
  const double similarity = cosine(response, attribute.groups[k].embedding);
  if (similarity >= config.epsilon_orientation) {
    return Orientation{attribute.groups[k].id, similarity};
  }
  return std::nullopt;
}

std::optional<UnpleasantMatch> detect_unpleasant(const Embedding& response,
                                                 std::string_view group_id, const Lexicon& lexicon,
                                                 const DetectionConfig& config) {
  const auto sets = lexicon.word_sets(group_id);
  if (sets.unpleasant.empty()) {
    throw ValidationError("group '" + std::string(group_id) + "' has an empty unpleasant set");
  }
  const std::size_t best = nearest_by(response, sets.unpleasant,
                                      [](const LexiconEntry* e) -> const Embedding& {
                                        return e->embedding;
                                      });
  const LexiconEntry& entry = *sets.unpleasant[best];
  const double similarity = cosine(response, entry.embedding);
  if (similarity >= config.epsilon_unpleasant) {
    return UnpleasantMatch{entry.word, similarity, entry.embedding};
  }
  return std::nullopt;
}

BiasReport detect_embedded(std::string response_text, Embedding response_embedding,
                           std::string_view attribute_name, const Lexicon& lexicon,
                           const DetectionConfig& config) {
  const SensitiveAttribute& attribute = lexicon.attribute(attribute_name);
  BiasReport report{std::move(response_text), attribute.name, std::move(response_embedding),
                    std::nullopt, std::nullopt, {}};
  report.group_similarities.reserve(attribute.groups.size());
  for (const auto& group : attribute.groups) {
    report.group_similarities.emplace_back(group.id,
                                           cosine(report.response_embedding, group.embedding));
  }
  report.orientation = detect_orientation(report.response_embedding, attribute, config);
  if (report.orientation) {
    report.unpleasant =
        detect_unpleasant(report.response_embedding, report.orientation->group_id, lexicon, config);
  }
  return report;
}

BiasReport detect(const std::string& response_text, std::string_view attribute_name,
                  const Lexicon& lexicon, const DetectionConfig& config, Embedder& embedder,
                  const std::string& response_instruction) {
  // Resolve the attribute before paying for an embedding call.
  lexicon.attribute(attribute_name);
  Embedding embedding = [&] {
    try {
      return embedder.embed_one(response_text, response_instruction);
    } catch (const ProviderError& e) {
      throw ProviderError(std::string("embedding the response failed: ") + e.what(),
                          e.transient());
    }
  }();
  if (embedding.dim() != lexicon.dim()) {
    throw InvalidArgument("response embedding dim " + std::to_string(embedding.dim()) +
                          " does not match lexicon dim " + std::to_string(lexicon.dim()));
  }
  return detect_embedded(response_text, std::move(embedding), attribute_name, lexicon, config);
}

}  // namespace fairwrite
