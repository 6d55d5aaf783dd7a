#include "fairwrite/serialize.hpp"

#include <cmath>

namespace fairwrite {

using json = nlohmann::json;

namespace {

json vector_json(const Embedding& e) {
  json out = json::array();
  for (double x : e.values()) out.push_back(x);
  return out;
}

}  // namespace

double round6(double value) {
  const double rounded = std::round(value * 1e6) / 1e6;
  return rounded == 0.0 ? 0.0 : rounded;  // no "-0.0"
}

json to_json(const BiasReport& report, bool include_vectors) {
  json out;
  out["attribute"] = report.attribute;
  out["response_text"] = report.response_text;
  json similarities = json::array();
  for (const auto& [group, similarity] : report.group_similarities) {
    similarities.push_back({{"group", group}, {"similarity", round6(similarity)}});
  }
  out["group_similarities"] = std::move(similarities);
  out["orientation"] = report.orientation
                           ? json{{"group", report.orientation->group_id},
                                  {"similarity", round6(report.orientation->similarity)}}
                           : json(nullptr);
  out["unpleasant"] = report.unpleasant
                          ? json{{"word", report.unpleasant->word},
                                 {"similarity", round6(report.unpleasant->similarity)}}
                          : json(nullptr);
  if (include_vectors) {
    out["response_embedding"] = vector_json(report.response_embedding);
    if (report.unpleasant) out["unpleasant"]["embedding"] = vector_json(report.unpleasant->embedding);
  }
  return out;
}

json to_json(const Resolution& resolution, bool include_vectors) {
  json out{{"group", resolution.group_id},
           {"pleasant_word", resolution.pleasant_word},
           {"pleasant_similarity", round6(resolution.pleasant_similarity)}};
  if (include_vectors) out["repair_vector"] = vector_json(resolution.repair_vector);
  return out;
}

json to_json(const RewriteInstruction& instruction) {
  return json{{"template_id", instruction.template_id},
              {"text", instruction.rendered_text},
              {"slots", instruction.slots}};
}

json to_json(const DebiasOutcome& outcome, bool include_vectors) {
  json out;
  out["prompt"] = outcome.prompt;
  out["original"] = outcome.original;
  out["report"] = to_json(outcome.report, include_vectors);
  out["resolution"] = outcome.resolution ? to_json(*outcome.resolution, include_vectors) : json(nullptr);
  out["instruction"] = outcome.instruction ? to_json(*outcome.instruction) : json(nullptr);
  out["rewritten"] = outcome.rewritten ? json(*outcome.rewritten) : json(nullptr);
  out["passed_through"] = outcome.passed_through;
  out["pass_reason"] = outcome.pass_reason;
  return out;
}

}  // namespace fairwrite
