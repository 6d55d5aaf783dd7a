#include "fairwrite/providers/fixture_format.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fairwrite/errors.hpp"
#include "fairwrite/util/files.hpp"

namespace fairwrite {

using json = nlohmann::json;

std::string embedding_key(std::string_view model_id, std::string_view instruction,
                          std::string_view text) {
  std::string material;
  material.reserve(model_id.size() + instruction.size() + text.size() + 2);
  material.append(model_id).push_back('\x1f');
  material.append(instruction).push_back('\x1f');
  material.append(text);
  return sha256_hex(material);
}

std::string vector_checksum(std::span<const double> vector) {
  const auto bytes = std::string_view(reinterpret_cast<const char*>(vector.data()),
                                      vector.size() * sizeof(double));
  return sha256_hex(bytes).substr(0, 16);
}

namespace {

FixtureRecord parse_record(const json& node, const FixtureManifest& manifest) {
  if (!node.is_object()) throw ValidationError("record is not an object");
  FixtureRecord record;
  auto need_string = [&](const char* key) {
    auto it = node.find(key);
    if (it == node.end() || !it->is_string()) {
      throw ValidationError(std::string("missing or non-string '") + key + "'");
    }
    return it->get<std::string>();
  };
  record.key = need_string("key");
  record.text = need_string("text");
  if (auto it = node.find("instruction"); it != node.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError("'instruction' must be a string");
    record.instruction = it->get<std::string>();
  }
  auto vec = node.find("vector");
  if (vec == node.end() || !vec->is_array()) throw ValidationError("missing 'vector' array");
  record.vector.reserve(vec->size());
  for (const auto& x : *vec) {
    if (!x.is_number()) throw ValidationError("non-numeric vector component");
    const double value = x.get<double>();
    if (!std::isfinite(value)) throw ValidationError("non-finite vector component");
    record.vector.push_back(value);
  }
  if (auto it = node.find("created_at"); it != node.end() && it->is_string()) {
    record.created_at = it->get<std::string>();
  }
  if (auto it = node.find("checksum"); it != node.end() && it->is_string()) {
    record.checksum = it->get<std::string>();
  }

  if (record.text.empty()) throw ValidationError("empty text");
  if (record.vector.size() != manifest.dim) {
    throw ValidationError("vector has " + std::to_string(record.vector.size()) +
                          " components, manifest dim is " + std::to_string(manifest.dim));
  }
  if (record.key != embedding_key(manifest.model_id, record.instruction, record.text)) {
    throw ValidationError("key does not match (model_id, instruction, text)");
  }
  if (record.checksum && *record.checksum != vector_checksum(record.vector)) {
    throw ValidationError("vector checksum mismatch");
  }
  return record;
}

}  // namespace

FixtureFile parse_fixture_text(std::string_view text, bool strict, const std::string& source_name) {
  FixtureFile file;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_number = 0;
  bool have_manifest = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = source_name + ":" + std::to_string(line_number);

    if (!have_manifest) {
      json manifest;
      try {
        manifest = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ValidationError(where + ": manifest is not valid JSON: " + e.what());
      }
      auto model = manifest.find("model_id");
      auto dim = manifest.find("dim");
      if (!manifest.is_object() || model == manifest.end() || !model->is_string() ||
          dim == manifest.end() || !dim->is_number_unsigned() || dim->get<std::size_t>() == 0) {
        throw ValidationError(where + ": manifest must be {\"model_id\": string, \"dim\": N>0}");
      }
      file.manifest = {model->get<std::string>(), dim->get<std::size_t>()};
      have_manifest = true;
      continue;
    }

    try {
      json node;
      try {
        node = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ValidationError(std::string("unparseable line: ") + e.what());
      }
      file.records.push_back(parse_record(node, file.manifest));
    } catch (const ValidationError& e) {
      if (strict) throw ValidationError(where + ": " + e.what());
      file.problems.push_back(where + ": " + e.what());
    }
  }
  if (!have_manifest) {
    throw ValidationError(source_name + ": missing manifest line");
  }
  return file;
}

FixtureFile read_fixture_file(const std::filesystem::path& path, bool strict) {
  return parse_fixture_text(read_text_file(path), strict, path.string());
}

std::string render_fixture(const FixtureManifest& manifest, std::span<const FixtureRecord> records) {
  std::string out = json{{"model_id", manifest.model_id}, {"dim", manifest.dim}}.dump() + "\n";
  for (const auto& record : records) {
    json node{{"key", record.key},
              {"text", record.text},
              {"instruction", record.instruction},
              {"vector", record.vector}};
    if (record.created_at) node["created_at"] = *record.created_at;
    if (record.checksum) node["checksum"] = *record.checksum;
    out += node.dump() + "\n";
  }
  return out;
}

}  // namespace fairwrite
