#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pnet/core/model.hpp"

namespace pnet::io {

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kFormatName = "pnet-model";

/// Canonical JSON text of a model: sorted keys, modules by id, labels by
/// text, two-space indentation, trailing newline. Equal models always
/// serialize to identical bytes.
std::string save(const Model& model);

/// Parses a document produced by save(). Throws ParseError (with line and
/// column when the JSON itself is malformed), VersionUnsupported or
/// IntegrityError. Nothing is constructed on failure.
Model load(std::string_view text);

void save_file(const Model& model, const std::filesystem::path& path);
Model load_file(const std::filesystem::path& path);

/// Reads a whole file; throws IoError.
std::string read_text(const std::filesystem::path& path);
/// Writes a whole file atomically (temp file + rename); throws IoError.
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace pnet::io
