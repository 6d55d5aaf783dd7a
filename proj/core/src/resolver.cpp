#include "fairwrite/resolver.hpp"

namespace fairwrite {

Resolution resolve(const BiasReport& report, const Lexicon& lexicon, const DetectionConfig& config) {
  if (!report.orientation) {
    throw InvalidArgument("resolve: report has no orientation");
  }
  if (!report.unpleasant) {
    throw InvalidArgument("resolve: report has no unpleasant characteristic");
  }
  const std::string& group_id = report.orientation->group_id;
  const auto sets = lexicon.word_sets(group_id);
  if (sets.pleasant.empty()) {
    throw ValidationError("group '" + group_id + "' has an empty pleasant set");
  }

  Embedding repair = repair_vector(report.response_embedding, report.unpleasant->embedding,
                                   config.delta_degenerate);
  const std::size_t best =
      nearest_by(repair, sets.pleasant,
                 [](const LexiconEntry* e) -> const Embedding& { return e->embedding; });
  const LexiconEntry& chosen = *sets.pleasant[best];
  const double similarity = cosine(chosen.embedding, repair);
  return Resolution{std::move(repair), chosen.word, similarity, group_id};
}

}  // namespace fairwrite
