#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace corrcast::csv {

// Splits one CSV line on commas. No quoting; fields are trimmed of
// surrounding whitespace.
std::vector<std::string> split_line(std::string_view line);

std::string trim(std::string_view s);

// Reads a whole text file. Throws ParseError if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes `content` only if the file is absent or differs, so reruns leave
// mtimes untouched. Returns true when the file was (re)written.
bool write_file_if_changed(const std::filesystem::path& path,
                           std::string_view content);

// Formats a double with shortest round-trip representation.
std::string format_double(double v);

} // namespace corrcast::csv
