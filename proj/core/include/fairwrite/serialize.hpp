#pragma once

#include <nlohmann/json.hpp>

#include "fairwrite/detector.hpp"
#include "fairwrite/resolver.hpp"
#include "fairwrite/rewriter.hpp"

namespace fairwrite {

/// Rounds to 6 decimals so serialized reports do not depend on the last few
/// bits of platform arithmetic.
double round6(double value);

/// Audit-oriented JSON. Raw vectors are omitted unless `include_vectors`.
nlohmann::json to_json(const BiasReport& report, bool include_vectors = false);
nlohmann::json to_json(const Resolution& resolution, bool include_vectors = false);
nlohmann::json to_json(const RewriteInstruction& instruction);
nlohmann::json to_json(const DebiasOutcome& outcome, bool include_vectors = false);

}  // namespace fairwrite
