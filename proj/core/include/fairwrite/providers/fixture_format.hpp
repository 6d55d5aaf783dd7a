#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairwrite {

// Embedding fixture / cache file (UTF-8, one JSON object per line):
//
//   {"model_id": "...", "dim": N}
//   {"key": "<hex>", "text": "...", "instruction": "...", "vector": [...]}
//   ...
//
// Cache-written records also carry "created_at" and "checksum". The key is
// the SHA-256 of model_id, instruction and text joined by U+001F.

struct FixtureManifest {
  std::string model_id;
  std::size_t dim = 0;
};

struct FixtureRecord {
  std::string key;
  std::string text;
  std::string instruction;
  std::vector<double> vector;
  std::optional<std::string> created_at;
  std::optional<std::string> checksum;
};

struct FixtureFile {
  FixtureManifest manifest;
  std::vector<FixtureRecord> records;
  /// Records that were rejected in lenient mode, one line each.
  std::vector<std::string> problems;
};

std::string embedding_key(std::string_view model_id, std::string_view instruction,
                          std::string_view text);

/// Short digest over the raw bytes of a vector.
std::string vector_checksum(std::span<const double> vector);

/// Strict mode throws ValidationError on the first bad record. Lenient mode
/// skips bad records (wrong dim, key mismatch, checksum mismatch, unparseable
/// line) and lists them in `problems`. A bad manifest always throws.
FixtureFile parse_fixture_text(std::string_view text, bool strict,
                               const std::string& source_name = "<memory>");
FixtureFile read_fixture_file(const std::filesystem::path& path, bool strict);

/// Manifest line followed by records in the given order.
std::string render_fixture(const FixtureManifest& manifest, std::span<const FixtureRecord> records);

}  // namespace fairwrite
