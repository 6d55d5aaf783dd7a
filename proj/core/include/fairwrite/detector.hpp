#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairwrite/geometry.hpp"
#include "fairwrite/lexicon.hpp"

namespace fairwrite {

class Embedder;

/// Similarity gates for the two detection stages plus the repair-vector
/// degeneracy tolerance. Defaults are uncalibrated.
struct DetectionConfig {
  double epsilon_orientation = 0.8;
  double epsilon_unpleasant = 0.8;
  double delta_degenerate = kDefaultDegenerateDelta;

  /// Throws ConfigError unless both epsilons are in (0, 1] and
  /// 0 < delta_degenerate < 1. Values above 1 are accepted only when
  /// `allow_unreachable` is set (used to force pass-through).
  void validate(bool allow_unreachable = false) const;
};

struct Orientation {
  std::string group_id;
  double similarity = 0.0;
};

struct UnpleasantMatch {
  std::string word;
  double similarity = 0.0;
  Embedding embedding;
};

struct BiasReport {
  std::string response_text;
  std::string attribute;
  Embedding response_embedding;
  std::optional<Orientation> orientation;
  std::optional<UnpleasantMatch> unpleasant;
  /// (group id, cosine) in the attribute's group order.
  std::vector<std::pair<std::string, double>> group_similarities;

  bool biased() const noexcept { return orientation.has_value() && unpleasant.has_value(); }
};

/// Most similar group (ties -> lowest index); returned only if its
/// similarity reaches epsilon_orientation.
std::optional<Orientation> detect_orientation(const Embedding& response,
                                              const SensitiveAttribute& attribute,
                                              const DetectionConfig& config);

/// Most similar unpleasant word of `group_id` (ties -> lowest index);
/// returned only if its similarity reaches epsilon_unpleasant.
std::optional<UnpleasantMatch> detect_unpleasant(const Embedding& response,
                                                 std::string_view group_id, const Lexicon& lexicon,
                                                 const DetectionConfig& config);

/// Runs both stages on an already-embedded response.
BiasReport detect_embedded(std::string response_text, Embedding response_embedding,
                           std::string_view attribute_name, const Lexicon& lexicon,
                           const DetectionConfig& config);

/// Embeds the response once and runs both stages.
BiasReport detect(const std::string& response_text, std::string_view attribute_name,
                  const Lexicon& lexicon, const DetectionConfig& config, Embedder& embedder,
                  const std::string& response_instruction = {});

}  // namespace fairwrite
