#pragma once

#include <string>

#include "fairwrite/detector.hpp"
#include "fairwrite/geometry.hpp"
#include "fairwrite/lexicon.hpp"

namespace fairwrite {

/// The pleasant resolution w+ for a detected bias, together with the repair
/// vector it was selected against.
struct Resolution {
  Embedding repair_vector;
  std::string pleasant_word;
  double pleasant_similarity = 0.0;
  std::string group_id;
};

/// Computes u* from the response and unpleasant embeddings and picks the
/// entry of the oriented group's T+ closest to it (no similarity floor).
///
/// Throws InvalidArgument if the report lacks orientation or unpleasant
/// match, and DegenerateRepair if u* is undefined.
Resolution resolve(const BiasReport& report, const Lexicon& lexicon, const DetectionConfig& config);

}  // namespace fairwrite
