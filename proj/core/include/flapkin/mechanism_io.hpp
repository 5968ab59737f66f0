#pragma once

#include "flapkin/mechanism.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace flapkin {

/// Parses a mechanism document. Throws SyntaxError (with line and column),
/// SchemaError (with the offending field path) or VersionError.
LinkageSpec parse_mechanism(std::string_view json);
LinkageSpec parse_mechanism_file(const std::filesystem::path& path);

/// Deterministic, lossless serialization (shortest round-trip numbers).
std::string format_mechanism(const LinkageSpec& spec);
void write_mechanism_file(const LinkageSpec& spec, const std::filesystem::path& path);

/// Reads a whole file; throws IoError.
std::string read_text_file(const std::filesystem::path& path);
/// Writes a whole file; throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace flapkin
