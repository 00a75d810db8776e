#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace topicsent::textio {

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

std::vector<std::string_view> split(std::string_view line, char sep);

/// Reads a whole file; throws std::runtime_error naming the path on failure.
std::string read_file(const std::filesystem::path& path);
/// Writes content, creating parent directories; throws on failure.
void write_file(const std::filesystem::path& path, std::string_view content);

/// SHA-256 of content as lowercase hex.
std::string sha256_hex(std::string_view content);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

}  // namespace topicsent::textio
