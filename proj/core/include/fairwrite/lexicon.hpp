#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairwrite/geometry.hpp"

namespace fairwrite {

class Embedder;

enum class Polarity { kPleasant, kUnpleasant };

std::string_view to_string(Polarity polarity);
Polarity parse_polarity(std::string_view text);

struct DemographicGroup {
  std::string id;
  std::string surface_text;
  Embedding embedding;
};

struct SensitiveAttribute {
  std::string name;
  std::vector<DemographicGroup> groups;
};

struct LexiconEntry {
  std::string word;
  std::string contextualized_text;
  Polarity polarity;
  std::string group_id;
  Embedding embedding;
};

/// Pleasant (T+) and unpleasant (T-) entries of one group, in file order.
struct WordSets {
  std::vector<const LexiconEntry*> pleasant;
  std::vector<const LexiconEntry*> unpleasant;
};

inline constexpr std::string_view kDefaultTemplate = "This is {}";

/// Replaces the single "{}" placeholder in `text_template` with `word`.
/// Throws InvalidArgument when the template has zero or several placeholders.
std::string contextualize(std::string_view word, std::string_view text_template);

/// Immutable, validated collection of attributes, groups and word sets.
class Lexicon {
 public:
  /// Validates every invariant and throws ValidationError listing all
  /// violations if any are found.
  Lexicon(std::string embedding_model_id, std::size_t dim, std::string text_template,
          std::vector<SensitiveAttribute> attributes, std::vector<LexiconEntry> entries);

  const std::string& embedding_model_id() const noexcept { return model_id_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::string& text_template() const noexcept { return template_; }
  const std::vector<SensitiveAttribute>& attributes() const noexcept { return attributes_; }
  const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }

  /// Throws NotFound for unknown names.
  const SensitiveAttribute& attribute(std::string_view name) const;
  const DemographicGroup& group(std::string_view id) const;
  bool has_group(std::string_view id) const noexcept;

  /// Order-preserving partition of a group's entries by polarity.
  WordSets word_sets(std::string_view group_id) const;

 private:
  std::string model_id_;
  std::size_t dim_;
  std::string template_;
  std::vector<SensitiveAttribute> attributes_;
  std::vector<LexiconEntry> entries_;
};

// Raw, possibly-invalid lexicon document as read from disk.  Vectors are
// optional here; they may be filled by an embedder before validation.
struct LexiconDocument {
  struct Group {
    std::string id;
    std::string surface_text;
    std::optional<std::vector<double>> vector;
  };
  struct Attribute {
    std::string name;
    std::vector<Group> groups;
  };
  struct Entry {
    std::string word;
    std::string group_id;
    std::string polarity;
    std::optional<std::vector<double>> vector;
  };

  std::string embedding_model_id;
  std::size_t dim = 0;
  std::string text_template{kDefaultTemplate};
  std::vector<Attribute> attributes;
  std::vector<Entry> entries;
};

/// Texts used when missing vectors are produced at load time.
struct EmbedAtLoad {
  Embedder* embedder = nullptr;
  std::string group_instruction;
  std::string word_instruction;
};

/// Parses the JSON lexicon format. Throws ValidationError on malformed JSON
/// or schema violations (with the offending location).
LexiconDocument parse_lexicon_document(const std::filesystem::path& path);
LexiconDocument parse_lexicon_document_text(std::string_view json_text,
                                            const std::string& source_name = "<memory>");

/// Every invariant violation in the document, one line each. Empty iff valid.
/// Missing vectors count as violations unless `allow_missing_vectors`.
std::vector<std::string> validate_lexicon_document(const LexiconDocument& doc,
                                                   bool allow_missing_vectors = false);

/// Loads and validates a lexicon. With `embed` set, absent vectors are
/// requested from the embedder; otherwise they are rejected.
Lexicon load_lexicon(const std::filesystem::path& path,
                     const std::optional<EmbedAtLoad>& embed = std::nullopt);
Lexicon build_lexicon(LexiconDocument doc, const std::optional<EmbedAtLoad>& embed = std::nullopt);

/// Canonical JSON text for a lexicon (stable key order, shortest round-trip
/// number formatting).
std::string lexicon_to_json(const Lexicon& lexicon);
void save_lexicon(const Lexicon& lexicon, const std::filesystem::path& path);

}  // namespace fairwrite
