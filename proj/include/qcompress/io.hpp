#pragma once

#include <string>

#include "qcompress/channelsynth.hpp"
#include "qcompress/fixtures.hpp"

namespace qcompress {

inline constexpr const char* kFormatVersion = "1.0";

// Observable files: {format_version, dim, operators: [{name, re, im}]} with
// re/im as lists of rows. Hermiticity is checked on load.
std::string observable_file_json(const Fixture& f);
Fixture parse_observable_file(const std::string& text, const Tolerances& tol = default_tolerances());

// Schemes: {format_version, dim, d, n, kept_blocks, compress, decompress},
// each channel {dim_in, dim_out, classical, kraus: [{re, im}]}.
std::string scheme_json(const CompressionScheme& scheme);
CompressionScheme parse_scheme(const std::string& text);

std::string read_file(const std::string& path);    // ParseError when unreadable
void write_file(const std::string& path, const std::string& text);

}  // namespace qcompress
