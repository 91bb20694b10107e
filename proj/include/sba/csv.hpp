#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sba::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Shortest text that is still lossless: 17 significant digits.
std::string format_double(double value);

// Reads a comma-separated file. If expected_header is non-empty the first
// line must match it exactly, otherwise Error(Format) is thrown. Every row
// must have as many fields as the header.
Table read(const std::filesystem::path& path, const std::vector<std::string>& expected_header = {});

double parse_double(std::string_view field, std::string_view context);
unsigned long long parse_unsigned(std::string_view field, std::string_view context);

std::string read_text(const std::filesystem::path& path);
// Throws Error(Io) when the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& contents);

}  // namespace sba::csv
