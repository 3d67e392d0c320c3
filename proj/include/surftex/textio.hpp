#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// Small text and file helpers shared by the CSV-style formats.
namespace surftex::textio {

/// Shortest decimal rendering that parses back to the identical double.
std::string format_double(double v);

/// Strict parse of a full field; throws DataError naming `what` on failure.
double parse_double(std::string_view field, std::string_view what);
long long parse_int(std::string_view field, std::string_view what);
std::uint64_t parse_u64(std::string_view field, std::string_view what);

std::vector<std::string> split(std::string_view line, char sep);
std::string join(const std::vector<std::string>& parts, char sep);
std::string_view trim(std::string_view s);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`, so readers
/// never observe a partially written file.
void atomic_write(const std::filesystem::path& path, std::string_view content);

/// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string> lines(std::string_view text);

}  // namespace surftex::textio
