#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace fairwrite {

/// Whole-file read. Throws NotFound if the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace fairwrite
