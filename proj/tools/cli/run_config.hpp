#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairwrite/detector.hpp"
#include "fairwrite/lexicon.hpp"
#include "fairwrite/providers/cache.hpp"
#include "fairwrite/providers/chat.hpp"
#include "fairwrite/providers/classifier.hpp"
#include "fairwrite/providers/embedding.hpp"
#include "fairwrite/rewriter.hpp"

namespace fairwrite::cli {

// Documented defaults for the instruction-tuned embedder, one per text role.
inline constexpr const char* kDefaultResponseInstruction =
    "Represent the response for identifying the demographic group it describes";
inline constexpr const char* kDefaultGroupInstruction =
    "Represent the demographic group description for similarity search";
inline constexpr const char* kDefaultWordInstruction =
    "Represent the characteristic description for similarity search";

/// Everything a command needs, as one JSON document:
///
///   {"lexicon": "lexicon.json", "embed_at_load": false,
///    "detection": {"eps_orient": 0.8, "eps_unpleasant": 0.8, "delta": 1e-6,
///                  "allow_unreachable": false},
///    "instructions": {"response": "...", "group": "...", "word": "..."},
///    "providers": {"embedding": {...}, "llm": {...},
///                  "classifier": {"toxicity": {...}, "regard": {...}, "sentiment": {...}}},
///    "cache": null, "task_mode": "chat_rewrite", "template_dir": null,
///    "output": "out", "workers": 1, "seed": 0, "max_error_fraction": 0.1,
///    "redetect": false}
///
/// Provider blocks carry a "kind": embedding is fixture | synthetic | http,
/// llm is rules | scripted | echo | http, each classifier is fixture | http.
/// Relative paths resolve against the config file's directory.
struct RunConfig {
  nlohmann::json raw;  // merged document, after overrides
  std::filesystem::path base_dir;

  std::filesystem::path lexicon;
  bool embed_at_load = false;
  DetectionConfig detection;
  bool allow_unreachable = false;
  std::string response_instruction = kDefaultResponseInstruction;
  std::string group_instruction = kDefaultGroupInstruction;
  std::string word_instruction = kDefaultWordInstruction;
  nlohmann::json embedding_provider;
  nlohmann::json llm_provider;
  nlohmann::json classifier_providers = nlohmann::json::object();
  std::optional<std::filesystem::path> cache;
  TaskMode task_mode = TaskMode::kChatRewrite;
  std::optional<std::filesystem::path> template_dir;
  std::filesystem::path output = "out";
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  double max_error_fraction = 0.10;
  bool redetect = false;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
};

/// Sets `dotted.key.path` in `doc` to `value`, parsed as JSON when it parses
/// and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Parses `doc` (already merged with overrides). Throws ConfigError naming the
/// offending field; also checks that referenced files exist.
RunConfig parse_run_config(nlohmann::json doc, std::filesystem::path base_dir);

/// Reads the config file (or starts from an empty document when `path` is
/// empty) and applies the overrides in order.
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides);

/// Structural checks of provider blocks that need no network and no
/// credentials: kinds known, required fields present, files exist.
void validate_providers(const RunConfig& config);

/// Live objects built from a RunConfig. Owns everything the pipeline refers to.
struct Runtime {
  std::shared_ptr<Embedder> embedder;
  std::shared_ptr<EmbeddingCache> cache;
  std::shared_ptr<ChatModel> llm;
  std::shared_ptr<RoutingClassifier> classifier;  // null when none configured
  std::unique_ptr<Lexicon> lexicon;
  std::unique_ptr<TemplateSet> templates;
  std::unique_ptr<DebiasPipeline> pipeline;
};

std::shared_ptr<Embedder> make_embedder(const RunConfig& config);
std::shared_ptr<ChatModel> make_chat_model(const RunConfig& config);
std::shared_ptr<RoutingClassifier> make_classifier(const RunConfig& config);
TemplateSet make_templates(const RunConfig& config);
Lexicon make_lexicon(const RunConfig& config, Embedder* embedder);

/// `need_llm` false skips building the chat model (detect needs none).
Runtime build_runtime(const RunConfig& config, bool need_llm = true);

}  // namespace fairwrite::cli
