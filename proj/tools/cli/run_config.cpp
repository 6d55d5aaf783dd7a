#include "run_config.hpp"

#include <set>

#include "fairwrite/errors.hpp"
#include "fairwrite/providers/http.hpp"
#include "fairwrite/util/files.hpp"

namespace fairwrite::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json& child(const json& doc, const char* key) {
  static const json kNull;
  if (!doc.is_object()) return kNull;
  auto it = doc.find(key);
  return it == doc.end() ? kNull : *it;
}

template <typename T>
T get_or(const json& doc, const char* key, T fallback, const std::string& where) {
  const json& value = child(doc, key);
  if (value.is_null()) return fallback;
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

std::string require_string(const json& block, const char* key, const std::string& where) {
  const json& value = child(block, key);
  if (!value.is_string() || value.get<std::string>().empty()) {
    throw ConfigError(where + "." + key + " must be a non-empty string");
  }
  return value.get<std::string>();
}

void require_file(const fs::path& path, const std::string& what) {
  if (!fs::is_regular_file(path)) {
    throw ConfigError(what + " not found: " + path.string());
  }
}

std::string kind_of(const json& block, const std::string& where) {
  if (!block.is_object()) throw ConfigError(where + " must be an object with a \"kind\"");
  return require_string(block, "kind", where);
}

ProviderConfig provider_config(const json& block, const std::string& where) {
  ProviderConfig config;
  config.endpoint_url = require_string(block, "endpoint_url", where);
  config.auth_env_var = get_or<std::string>(block, "auth_env_var", "", where);
  config.model_id = require_string(block, "model_id", where);
  config.timeout_ms = get_or<int>(block, "timeout_ms", config.timeout_ms, where);
  config.max_retries = get_or<int>(block, "max_retries", config.max_retries, where);
  config.max_concurrent_requests =
      get_or<int>(block, "max_concurrent_requests", config.max_concurrent_requests, where);
  config.validate();
  return config;
}

EmbeddingApiShape embedding_shape(const json& block, const std::string& where) {
  const json& s = child(block, "shape");
  const std::string w = where + ".shape";
  EmbeddingApiShape shape;
  shape.input_field = get_or<std::string>(s, "input_field", shape.input_field, w);
  shape.instruction_mode = get_or<std::string>(s, "instruction_mode", shape.instruction_mode, w);
  shape.vectors_pointer = get_or<std::string>(s, "vectors_pointer", shape.vectors_pointer, w);
  shape.vector_field = get_or<std::string>(s, "vector_field", shape.vector_field, w);
  shape.max_batch = get_or<std::size_t>(s, "max_batch", shape.max_batch, w);
  shape.dim = get_or<std::size_t>(block, "dim", 0, where);
  static const std::set<std::string> kModes{"none", "prefix", "pair"};
  if (!kModes.contains(shape.instruction_mode)) {
    throw ConfigError(w + ".instruction_mode must be none, prefix or pair");
  }
  if (shape.dim == 0) throw ConfigError(where + ".dim must be a positive integer");
  if (shape.max_batch == 0) throw ConfigError(w + ".max_batch must be positive");
  return shape;
}

ChatApiShape chat_shape(const json& block, const std::string& where) {
  const json& s = child(block, "shape");
  const std::string w = where + ".shape";
  ChatApiShape shape;
  shape.messages_field = get_or<std::string>(s, "messages_field", shape.messages_field, w);
  shape.content_pointer = get_or<std::string>(s, "content_pointer", shape.content_pointer, w);
  if (child(s, "temperature").is_null() && s.is_object() && s.contains("temperature")) {
    shape.temperature.reset();
  } else {
    shape.temperature = get_or<double>(s, "temperature", *shape.temperature, w);
  }
  return shape;
}

ClassifierApiShape classifier_shape(const json& block, const std::string& where) {
  const json& s = child(block, "shape");
  const std::string w = where + ".shape";
  ClassifierApiShape shape;
  shape.input_field = get_or<std::string>(s, "input_field", shape.input_field, w);
  shape.label_field = get_or<std::string>(s, "label_field", shape.label_field, w);
  shape.score_field = get_or<std::string>(s, "score_field", shape.score_field, w);
  shape.label_map = get_or<std::map<std::string, std::string>>(s, "label_map", {}, w);
  shape.toxicity_label = get_or<std::string>(s, "toxicity_label", shape.toxicity_label, w);
  shape.score_scale = get_or<double>(s, "score_scale", shape.score_scale, w);
  if (!(shape.score_scale > 0)) throw ConfigError(w + ".score_scale must be positive");
  return shape;
}

void validate_embedding_block(const RunConfig& config) {
  const std::string where = "providers.embedding";
  const json& block = config.embedding_provider;
  const std::string kind = kind_of(block, where);
  if (kind == "fixture") {
    require_file(config.resolve(require_string(block, "path", where)), "embedding fixture");
  } else if (kind == "synthetic") {
    if (get_or<std::size_t>(block, "dim", 0, where) == 0) {
      throw ConfigError(where + ".dim must be a positive integer");
    }
  } else if (kind == "http") {
    provider_config(block, where);
    embedding_shape(block, where);
  } else {
    throw ConfigError(where + ".kind must be fixture, synthetic or http, got '" + kind + "'");
  }
}

void validate_llm_block(const RunConfig& config) {
  const std::string where = "providers.llm";
  const json& block = config.llm_provider;
  const std::string kind = kind_of(block, where);
  if (kind == "rules") {
    require_file(config.resolve(require_string(block, "path", where)), "chat rules file");
  } else if (kind == "scripted") {
    if (!child(block, "replies").is_array()) throw ConfigError(where + ".replies must be an array");
  } else if (kind == "echo") {
  } else if (kind == "http") {
    provider_config(block, where);
    chat_shape(block, where);
  } else {
    throw ConfigError(where + ".kind must be rules, scripted, echo or http, got '" + kind + "'");
  }
}

void validate_classifier_blocks(const RunConfig& config) {
  if (!config.classifier_providers.is_object()) {
    throw ConfigError("providers.classifier must be an object keyed by classifier kind");
  }
  for (const auto& [name, block] : config.classifier_providers.items()) {
    const std::string where = "providers.classifier." + name;
    try {
      parse_classifier_kind(name);
    } catch (const Error&) {
      throw ConfigError(where + ": unknown classifier kind (toxicity, regard, sentiment)");
    }
    const std::string kind = kind_of(block, where);
    if (kind == "fixture") {
      require_file(config.resolve(require_string(block, "path", where)), "classifier fixture");
    } else if (kind == "http") {
      provider_config(block, where);
      classifier_shape(block, where);
    } else {
      throw ConfigError(where + ".kind must be fixture or http, got '" + kind + "'");
    }
  }
}

std::vector<std::string> split_dots(const std::string& key) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    parts.push_back(key.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return parts;
}

}  // namespace

fs::path RunConfig::resolve(const fs::path& p) const {
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value, got '" + assignment + "'");
  }
  const auto parts = split_dots(assignment.substr(0, eq));
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (parts[i].empty()) throw ConfigError("empty key segment in '" + assignment + "'");
    if (node->is_null()) *node = json::object();
    if (!node->is_object()) {
      throw ConfigError("cannot set '" + assignment.substr(0, eq) + "': '" + parts[i] +
                        "' is not an object");
    }
    node = &(*node)[parts[i]];
  }
  if (parts.back().empty()) throw ConfigError("empty key segment in '" + assignment + "'");
  if (node->is_null()) *node = json::object();
  if (!node->is_object()) {
    throw ConfigError("cannot set '" + assignment.substr(0, eq) + "': parent is not an object");
  }
  (*node)[parts.back()] = std::move(value);
}

RunConfig parse_run_config(json doc, fs::path base_dir) {
  if (doc.is_null()) doc = json::object();
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> kKnown{
      "lexicon",  "embed_at_load", "detection", "instructions", "providers",
      "cache",    "task_mode",     "template_dir", "output",    "workers",
      "seed",     "max_error_fraction", "redetect"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKnown.contains(key)) throw ConfigError("unknown config field '" + key + "'");
  }

  RunConfig config;
  config.base_dir = std::move(base_dir);
  const std::string top = "config";

  config.lexicon = require_string(doc, "lexicon", top);
  config.embed_at_load = get_or<bool>(doc, "embed_at_load", false, top);

  const json& detection = child(doc, "detection");
  config.detection.epsilon_orientation =
      get_or<double>(detection, "eps_orient", config.detection.epsilon_orientation, "detection");
  config.detection.epsilon_unpleasant = get_or<double>(
      detection, "eps_unpleasant", config.detection.epsilon_unpleasant, "detection");
  config.detection.delta_degenerate =
      get_or<double>(detection, "delta", config.detection.delta_degenerate, "detection");
  config.allow_unreachable = get_or<bool>(detection, "allow_unreachable", false, "detection");
  config.detection.validate(config.allow_unreachable);

  const json& instructions = child(doc, "instructions");
  config.response_instruction =
      get_or<std::string>(instructions, "response", config.response_instruction, "instructions");
  config.group_instruction =
      get_or<std::string>(instructions, "group", config.group_instruction, "instructions");
  config.word_instruction =
      get_or<std::string>(instructions, "word", config.word_instruction, "instructions");

  const json& providers = child(doc, "providers");
  config.embedding_provider = child(providers, "embedding");
  config.llm_provider = child(providers, "llm");
  const json& classifiers = child(providers, "classifier");
  if (!classifiers.is_null()) config.classifier_providers = classifiers;

  if (auto cache = get_or<std::string>(doc, "cache", "", top); !cache.empty()) config.cache = cache;
  config.task_mode = parse_task_mode(get_or<std::string>(doc, "task_mode", "chat_rewrite", top));
  if (auto dir = get_or<std::string>(doc, "template_dir", "", top); !dir.empty()) {
    config.template_dir = dir;
  }
  config.output = get_or<std::string>(doc, "output", "out", top);

  const auto workers = get_or<std::int64_t>(doc, "workers", 1, top);
  if (workers < 1 || workers > 256) throw ConfigError("workers must be in [1, 256]");
  config.workers = static_cast<std::size_t>(workers);
  config.seed = get_or<std::uint64_t>(doc, "seed", 0, top);
  config.max_error_fraction = get_or<double>(doc, "max_error_fraction", 0.10, top);
  if (!(config.max_error_fraction >= 0.0 && config.max_error_fraction <= 1.0)) {
    throw ConfigError("max_error_fraction must be in [0, 1]");
  }
  config.redetect = get_or<bool>(doc, "redetect", false, top);

  require_file(config.resolve(config.lexicon), "lexicon file");
  if (config.template_dir && !fs::is_directory(config.resolve(*config.template_dir))) {
    throw ConfigError("template directory not found: " + config.resolve(*config.template_dir).string());
  }
  config.raw = std::move(doc);
  return config;
}

RunConfig load_run_config(const fs::path& path, const std::vector<std::string>& overrides) {
  json doc = json::object();
  fs::path base_dir;
  if (!path.empty()) {
    std::string text;
    try {
      text = read_text_file(path);
    } catch (const NotFound&) {
      throw ConfigError("config file not found: " + path.string());
    }
    doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
    base_dir = path.parent_path();
  }
  for (const auto& assignment : overrides) apply_override(doc, assignment);
  return parse_run_config(std::move(doc), std::move(base_dir));
}

void validate_providers(const RunConfig& config) {
  validate_embedding_block(config);
  validate_llm_block(config);
  validate_classifier_blocks(config);
}

std::shared_ptr<Embedder> make_embedder(const RunConfig& config) {
  validate_embedding_block(config);
  const json& block = config.embedding_provider;
  const std::string where = "providers.embedding";
  const std::string kind = block["kind"].get<std::string>();
  std::shared_ptr<Embedder> embedder;
  if (kind == "fixture") {
    embedder = std::make_shared<FixtureEmbedder>(config.resolve(block["path"].get<std::string>()));
  } else if (kind == "synthetic") {
    embedder = std::make_shared<SyntheticEmbedder>(
        get_or<std::size_t>(block, "dim", 0, where),
        get_or<std::uint64_t>(block, "seed", config.seed, where),
        get_or<std::string>(block, "model_id", "synthetic", where));
  } else {
    embedder = std::make_shared<HttpEmbedder>(provider_config(block, where),
                                              embedding_shape(block, where));
  }
  return embedder;
}

std::shared_ptr<ChatModel> make_chat_model(const RunConfig& config) {
  validate_llm_block(config);
  const json& block = config.llm_provider;
  const std::string where = "providers.llm";
  const std::string kind = block["kind"].get<std::string>();
  if (kind == "rules") {
    return RuleChatModel::from_file(config.resolve(block["path"].get<std::string>()));
  }
  if (kind == "scripted") {
    return std::make_shared<ScriptedChatModel>(
        block["replies"].get<std::vector<std::string>>(),
        get_or<std::string>(block, "model_id", "scripted", where));
  }
  if (kind == "echo") {
    return std::make_shared<EchoChatModel>(get_or<std::string>(block, "model_id", "echo", where));
  }
  return std::make_shared<HttpChatModel>(provider_config(block, where), chat_shape(block, where));
}

std::shared_ptr<RoutingClassifier> make_classifier(const RunConfig& config) {
  validate_classifier_blocks(config);
  if (config.classifier_providers.empty()) return nullptr;
  auto routing = std::make_shared<RoutingClassifier>();
  // Fixture files often hold several kinds; load each file once.
  std::map<fs::path, std::shared_ptr<FixtureClassifier>> fixtures;
  for (const auto& [name, block] : config.classifier_providers.items()) {
    const std::string where = "providers.classifier." + name;
    const ClassifierKind kind = parse_classifier_kind(name);
    if (block["kind"] == "fixture") {
      const fs::path path = config.resolve(block["path"].get<std::string>());
      auto& fixture = fixtures[path];
      if (!fixture) fixture = std::make_shared<FixtureClassifier>(path);
      if (!fixture->supports(kind)) {
        throw ConfigError(where + ": " + path.string() + " has no '" + name + "' table");
      }
      routing->route(kind, fixture);
    } else {
      routing->route(kind, std::make_shared<HttpClassifier>(kind, provider_config(block, where),
                                                            classifier_shape(block, where)));
    }
  }
  return routing;
}

TemplateSet make_templates(const RunConfig& config) {
  return config.template_dir ? TemplateSet::from_directory(config.resolve(*config.template_dir))
                             : TemplateSet::defaults();
}

Lexicon make_lexicon(const RunConfig& config, Embedder* embedder) {
  const fs::path path = config.resolve(config.lexicon);
  if (!config.embed_at_load) return load_lexicon(path);
  if (embedder == nullptr) throw ConfigError("embed_at_load needs an embedding provider");
  return load_lexicon(path, EmbedAtLoad{embedder, config.group_instruction, config.word_instruction});
}

Runtime build_runtime(const RunConfig& config, bool need_llm) {
  Runtime runtime;
  runtime.embedder = make_embedder(config);
  if (config.cache) {
    runtime.cache = std::make_shared<EmbeddingCache>(
        config.resolve(*config.cache), runtime.embedder->model_id(), runtime.embedder->dim());
    runtime.embedder = std::make_shared<CachingEmbedder>(runtime.embedder, runtime.cache);
  }
  runtime.lexicon = std::make_unique<Lexicon>(make_lexicon(config, runtime.embedder.get()));
  if (runtime.lexicon->embedding_model_id() != runtime.embedder->model_id()) {
    throw ConfigError("lexicon was embedded with '" + runtime.lexicon->embedding_model_id() +
                      "' but the embedding provider is '" + runtime.embedder->model_id() + "'");
  }
  if (runtime.lexicon->dim() != runtime.embedder->dim()) {
    throw ConfigError("lexicon dim " + std::to_string(runtime.lexicon->dim()) +
                      " does not match embedding provider dim " +
                      std::to_string(runtime.embedder->dim()));
  }
  runtime.templates = std::make_unique<TemplateSet>(make_templates(config));
  runtime.classifier = make_classifier(config);
  runtime.llm = need_llm ? make_chat_model(config) : std::make_shared<EchoChatModel>();
  runtime.pipeline = std::make_unique<DebiasPipeline>(*runtime.lexicon, config.detection,
                                                      *runtime.embedder, *runtime.llm,
                                                      *runtime.templates, config.response_instruction);
  return runtime;
}

}  // namespace fairwrite::cli
