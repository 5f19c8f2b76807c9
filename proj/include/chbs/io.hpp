#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace chbs {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Comma-separated text with a header row. Blank lines and '#' comments are skipped.
CsvTable read_csv(std::istream& in);

/// Strict double parse; throws ConfigError naming `what`.
double parse_double(std::string_view text, std::string_view what);

/// Shortest round-trip decimal representation ("%.17g").
std::string format_double(double v);

/// Writes to a temporary sibling then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace chbs
