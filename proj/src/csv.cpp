#include "sba/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "sba/error.hpp"

namespace sba::csv {
namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open {}", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", path.string()));
  out << contents;
  out.flush();
  if (!out) throw Error(ErrorCode::Io, fmt::format("write to {} failed", path.string()));
}

Table read(const std::filesystem::path& path, const std::vector<std::string>& expected_header) {
  std::istringstream in(read_text(path));
  Table table;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (!have_header) {
      if (!expected_header.empty() && fields != expected_header) {
        throw Error(ErrorCode::Format,
                    fmt::format("{}: expected header '{}', got '{}'", path.string(),
                                fmt::join(expected_header, ","), line));
      }
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::Format, fmt::format("{}:{}: expected {} fields, got {}", path.string(),
                                                 line_no, table.header.size(), fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw Error(ErrorCode::Format, fmt::format("{}: empty file", path.string()));
  return table;
}

double parse_double(std::string_view field, std::string_view context) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::Format, fmt::format("{}: '{}' is not a number", context, field));
  }
  return value;
}

unsigned long long parse_unsigned(std::string_view field, std::string_view context) {
  unsigned long long value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::Format, fmt::format("{}: '{}' is not an unsigned integer", context, field));
  }
  return value;
}

}  // namespace sba::csv
