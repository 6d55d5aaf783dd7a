#include "fairwrite/lexicon.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "fairwrite/providers/embedding.hpp"
#include "fairwrite/util/files.hpp"

namespace fairwrite {

using json = nlohmann::json;

namespace {

constexpr std::string_view kPlaceholder = "{}";

std::size_t count_placeholders(std::string_view text) {
  std::size_t count = 0;
  for (auto pos = text.find(kPlaceholder); pos != std::string_view::npos;
       pos = text.find(kPlaceholder, pos + kPlaceholder.size())) {
    ++count;
  }
  return count;
}

std::string string_field(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end() || !it->is_string()) {
    throw ValidationError(where + ": missing or non-string field '" + key + "'");
  }
  return it->get<std::string>();
}

std::optional<std::vector<double>> vector_field(const json& object, const std::string& where) {
  auto it = object.find("vector");
  if (it == object.end() || it->is_null()) {
    return std::nullopt;
  }
  if (!it->is_array()) {
    throw ValidationError(where + ": 'vector' must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(it->size());
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& value = (*it)[i];
    if (!value.is_number()) {
      throw ValidationError(where + ": vector[" + std::to_string(i) + "] is not a number");
    }
    out.push_back(value.get<double>());
  }
  return out;
}

std::string describe_group(std::size_t a, std::size_t g, const std::string& id) {
  return "attributes[" + std::to_string(a) + "].groups[" + std::to_string(g) + "] (" + id + ")";
}

std::string describe_entry(std::size_t e, const std::string& word) {
  return "entries[" + std::to_string(e) + "] (" + word + ")";
}

void check_vector(const std::optional<std::vector<double>>& vector, std::size_t dim,
                  bool allow_missing, const std::string& where, std::vector<std::string>& out) {
  if (!vector) {
    if (!allow_missing) {
      out.push_back(where + ": missing vector");
    }
    return;
  }
  if (vector->size() != dim) {
    out.push_back(where + ": vector has " + std::to_string(vector->size()) +
                  " components, expected dim " + std::to_string(dim));
  }
  for (double x : *vector) {
    if (!std::isfinite(x)) {
      out.push_back(where + ": vector has a non-finite component");
      break;
    }
  }
}

}  // namespace

std::string_view to_string(Polarity polarity) {
  return polarity == Polarity::kPleasant ? "pleasant" : "unpleasant";
}

Polarity parse_polarity(std::string_view text) {
  if (text == "pleasant") return Polarity::kPleasant;
  if (text == "unpleasant") return Polarity::kUnpleasant;
  throw InvalidArgument("unknown polarity '" + std::string(text) + "'");
}

std::string contextualize(std::string_view word, std::string_view text_template) {
  const std::size_t placeholders = count_placeholders(text_template);
  if (placeholders != 1) {
    throw InvalidArgument("template '" + std::string(text_template) + "' has " +
                          std::to_string(placeholders) + " placeholders, expected exactly one");
  }
  std::string out(text_template);
  out.replace(out.find(kPlaceholder), kPlaceholder.size(), word);
  return out;
}

Lexicon::Lexicon(std::string embedding_model_id, std::size_t dim, std::string text_template,
                 std::vector<SensitiveAttribute> attributes, std::vector<LexiconEntry> entries)
    : model_id_(std::move(embedding_model_id)),
      dim_(dim),
      template_(std::move(text_template)),
      attributes_(std::move(attributes)),
      entries_(std::move(entries)) {
  // Re-validate through the document form so both construction paths share
  // one rule set.
  LexiconDocument doc;
  doc.embedding_model_id = model_id_;
  doc.dim = dim_;
  doc.text_template = template_;
  for (const auto& attribute : attributes_) {
    LexiconDocument::Attribute a{attribute.name, {}};
    for (const auto& group : attribute.groups) {
      const auto values = group.embedding.values();
      a.groups.push_back({group.id, group.surface_text,
                          std::vector<double>(values.begin(), values.end())});
    }
    doc.attributes.push_back(std::move(a));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& entry = entries_[i];
    const auto values = entry.embedding.values();
    doc.entries.push_back({entry.word, entry.group_id, std::string(to_string(entry.polarity)),
                           std::vector<double>(values.begin(), values.end())});
    if (entry.contextualized_text.find(entry.word) == std::string::npos) {
      throw ValidationError(describe_entry(i, entry.word) +
                            ": contextualized text does not contain the word");
    }
  }
  const auto problems = validate_lexicon_document(doc);
  if (!problems.empty()) {
    std::ostringstream message;
    message << "invalid lexicon (" << problems.size() << " problem(s)):";
    for (const auto& problem : problems) {
      message << "\n  " << problem;
    }
    throw ValidationError(message.str());
  }
}

const SensitiveAttribute& Lexicon::attribute(std::string_view name) const {
  for (const auto& attribute : attributes_) {
    if (attribute.name == name) return attribute;
  }
  throw NotFound("unknown attribute '" + std::string(name) + "'");
}

const DemographicGroup& Lexicon::group(std::string_view id) const {
  for (const auto& attribute : attributes_) {
    for (const auto& group : attribute.groups) {
      if (group.id == id) return group;
    }
  }
  throw NotFound("unknown group '" + std::string(id) + "'");
}

bool Lexicon::has_group(std::string_view id) const noexcept {
  for (const auto& attribute : attributes_) {
    for (const auto& group : attribute.groups) {
      if (group.id == id) return true;
    }
  }
  return false;
}

WordSets Lexicon::word_sets(std::string_view group_id) const {
  if (!has_group(group_id)) {
    throw NotFound("unknown group '" + std::string(group_id) + "'");
  }
  WordSets sets;
  for (const auto& entry : entries_) {
    if (entry.group_id != group_id) continue;
    (entry.polarity == Polarity::kPleasant ? sets.pleasant : sets.unpleasant).push_back(&entry);
  }
  return sets;
}

LexiconDocument parse_lexicon_document_text(std::string_view json_text,
                                            const std::string& source_name) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source_name + ": parse error: " + e.what());
  }
  if (!root.is_object()) {
    throw ValidationError(source_name + ": top level must be an object");
  }

  LexiconDocument doc;
  doc.embedding_model_id = string_field(root, "embedding_model_id", source_name);
  auto dim = root.find("dim");
  if (dim == root.end() || !dim->is_number_unsigned()) {
    throw ValidationError(source_name + ": 'dim' must be a positive integer");
  }
  doc.dim = dim->get<std::size_t>();
  if (root.contains("template")) {
    doc.text_template = string_field(root, "template", source_name);
  }

  auto attributes = root.find("attributes");
  if (attributes == root.end() || !attributes->is_array()) {
    throw ValidationError(source_name + ": 'attributes' must be an array");
  }
  for (std::size_t a = 0; a < attributes->size(); ++a) {
    const auto& node = (*attributes)[a];
    const std::string where = "attributes[" + std::to_string(a) + "]";
    if (!node.is_object()) throw ValidationError(where + ": must be an object");
    LexiconDocument::Attribute attribute;
    attribute.name = string_field(node, "name", where);
    auto groups = node.find("groups");
    if (groups == node.end() || !groups->is_array()) {
      throw ValidationError(where + ": 'groups' must be an array");
    }
    for (std::size_t g = 0; g < groups->size(); ++g) {
      const auto& group_node = (*groups)[g];
      const std::string group_where = where + ".groups[" + std::to_string(g) + "]";
      if (!group_node.is_object()) throw ValidationError(group_where + ": must be an object");
      attribute.groups.push_back({string_field(group_node, "id", group_where),
                                  string_field(group_node, "surface_text", group_where),
                                  vector_field(group_node, group_where)});
    }
    doc.attributes.push_back(std::move(attribute));
  }

  auto entries = root.find("entries");
  if (entries == root.end() || !entries->is_array()) {
    throw ValidationError(source_name + ": 'entries' must be an array");
  }
  for (std::size_t e = 0; e < entries->size(); ++e) {
    const auto& node = (*entries)[e];
    const std::string where = "entries[" + std::to_string(e) + "]";
    if (!node.is_object()) throw ValidationError(where + ": must be an object");
    doc.entries.push_back({string_field(node, "word", where), string_field(node, "group_id", where),
                           string_field(node, "polarity", where), vector_field(node, where)});
  }
  return doc;
}

LexiconDocument parse_lexicon_document(const std::filesystem::path& path) {
  return parse_lexicon_document_text(read_text_file(path), path.string());
}

std::vector<std::string> validate_lexicon_document(const LexiconDocument& doc,
                                                   bool allow_missing_vectors) {
  std::vector<std::string> problems;
  if (doc.dim == 0) {
    problems.push_back("dim must be >= 1");
  }
  if (const auto n = count_placeholders(doc.text_template); n != 1) {
    problems.push_back("template '" + doc.text_template + "' has " + std::to_string(n) +
                       " placeholders, expected exactly one");
  }
  if (doc.attributes.empty()) {
    problems.push_back("no attributes defined");
  }

  std::set<std::string> attribute_names;
  std::map<std::string, std::string> group_owner;  // group id -> attribute name
  for (std::size_t a = 0; a < doc.attributes.size(); ++a) {
    const auto& attribute = doc.attributes[a];
    const std::string where = "attributes[" + std::to_string(a) + "] (" + attribute.name + ")";
    if (attribute.name.empty()) problems.push_back(where + ": empty name");
    if (!attribute_names.insert(attribute.name).second) {
      problems.push_back(where + ": duplicate attribute name");
    }
    if (attribute.groups.size() < 2) {
      problems.push_back(where + ": needs at least 2 groups, has " +
                         std::to_string(attribute.groups.size()));
    }
    for (std::size_t g = 0; g < attribute.groups.size(); ++g) {
      const auto& group = attribute.groups[g];
      const std::string group_where = describe_group(a, g, group.id);
      if (group.id.empty()) problems.push_back(group_where + ": empty id");
      if (group.surface_text.empty()) problems.push_back(group_where + ": empty surface_text");
      if (!group_owner.emplace(group.id, attribute.name).second) {
        problems.push_back(group_where + ": duplicate group id");
      }
      if (doc.dim > 0) {
        check_vector(group.vector, doc.dim, allow_missing_vectors, group_where, problems);
      }
    }
  }

  std::map<std::string, std::pair<std::size_t, std::size_t>> polarity_counts;
  for (std::size_t e = 0; e < doc.entries.size(); ++e) {
    const auto& entry = doc.entries[e];
    const std::string where = describe_entry(e, entry.word);
    if (entry.word.empty()) problems.push_back(where + ": empty word");
    if (!group_owner.contains(entry.group_id)) {
      problems.push_back(where + ": group_id '" + entry.group_id + "' does not resolve");
    }
    if (entry.polarity == "pleasant") {
      ++polarity_counts[entry.group_id].first;
    } else if (entry.polarity == "unpleasant") {
      ++polarity_counts[entry.group_id].second;
    } else {
      problems.push_back(where + ": polarity must be 'pleasant' or 'unpleasant', got '" +
                         entry.polarity + "'");
    }
    if (doc.dim > 0) {
      check_vector(entry.vector, doc.dim, allow_missing_vectors, where, problems);
    }
  }

  for (const auto& attribute : doc.attributes) {
    for (const auto& group : attribute.groups) {
      const auto counts = polarity_counts[group.id];
      if (counts.first == 0) {
        problems.push_back("group '" + group.id + "': pleasant set T+ is empty");
      }
      if (counts.second == 0) {
        problems.push_back("group '" + group.id + "': unpleasant set T- is empty");
      }
    }
  }
  return problems;
}

Lexicon build_lexicon(LexiconDocument doc, const std::optional<EmbedAtLoad>& embed) {
  if (embed && embed->embedder == nullptr) {
    throw ConfigError("embed-at-load requested without an embedder");
  }
  auto problems = validate_lexicon_document(doc, embed.has_value());
  if (!problems.empty()) {
    std::ostringstream message;
    message << "invalid lexicon (" << problems.size() << " problem(s)):";
    for (const auto& problem : problems) message << "\n  " << problem;
    throw ValidationError(message.str());
  }

  if (embed) {
    if (embed->embedder->dim() != doc.dim) {
      throw ValidationError("embedder dim " + std::to_string(embed->embedder->dim()) +
                            " does not match lexicon dim " + std::to_string(doc.dim));
    }
    std::vector<EmbeddingRequest> requests;
    std::vector<std::optional<std::vector<double>>*> targets;
    for (auto& attribute : doc.attributes) {
      for (auto& group : attribute.groups) {
        if (!group.vector) {
          requests.push_back({group.surface_text, embed->group_instruction});
          targets.push_back(&group.vector);
        }
      }
    }
    for (auto& entry : doc.entries) {
      if (!entry.vector) {
        requests.push_back({contextualize(entry.word, doc.text_template), embed->word_instruction});
        targets.push_back(&entry.vector);
      }
    }
    if (!requests.empty()) {
      const auto vectors = embed->embedder->embed(requests);
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        const auto values = vectors[i].values();
        *targets[i] = std::vector<double>(values.begin(), values.end());
      }
    }
  }

  std::vector<SensitiveAttribute> attributes;
  for (auto& attribute : doc.attributes) {
    SensitiveAttribute out{attribute.name, {}};
    for (auto& group : attribute.groups) {
      out.groups.push_back({group.id, group.surface_text, Embedding(std::move(*group.vector))});
    }
    attributes.push_back(std::move(out));
  }
  std::vector<LexiconEntry> entries;
  for (auto& entry : doc.entries) {
    entries.push_back({entry.word, contextualize(entry.word, doc.text_template),
                       parse_polarity(entry.polarity), entry.group_id,
                       Embedding(std::move(*entry.vector))});
  }
  return Lexicon(doc.embedding_model_id, doc.dim, doc.text_template, std::move(attributes),
                 std::move(entries));
}

Lexicon load_lexicon(const std::filesystem::path& path, const std::optional<EmbedAtLoad>& embed) {
  return build_lexicon(parse_lexicon_document(path), embed);
}

std::string lexicon_to_json(const Lexicon& lexicon) {
  auto vec = [](const Embedding& e) { return json(std::vector<double>(e.values().begin(), e.values().end())); };
  json root;
  root["embedding_model_id"] = lexicon.embedding_model_id();
  root["dim"] = lexicon.dim();
  root["template"] = lexicon.text_template();
  root["attributes"] = json::array();
  for (const auto& attribute : lexicon.attributes()) {
    json groups = json::array();
    for (const auto& group : attribute.groups) {
      groups.push_back({{"id", group.id},
                        {"surface_text", group.surface_text},
                        {"vector", vec(group.embedding)}});
    }
    root["attributes"].push_back({{"name", attribute.name}, {"groups", std::move(groups)}});
  }
  root["entries"] = json::array();
  for (const auto& entry : lexicon.entries()) {
    root["entries"].push_back({{"word", entry.word},
                               {"group_id", entry.group_id},
                               {"polarity", std::string(to_string(entry.polarity))},
                               {"vector", vec(entry.embedding)}});
  }
  return root.dump(2) + "\n";
}

void save_lexicon(const Lexicon& lexicon, const std::filesystem::path& path) {
  write_file_atomic(path, lexicon_to_json(lexicon));
}

}  // namespace fairwrite
