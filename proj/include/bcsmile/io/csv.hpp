#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bcsmile::io {

// Minimal RFC-4180-ish reader: comma separated, optional double quotes,
// first row is the header. Rows keep their 1-based source line number.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;

  // Column index by name; throws ParseError naming the file if absent.
  std::size_t column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;

  double number(std::size_t row, std::size_t col) const;
  long long integer(std::size_t row, std::size_t col) const;
  const std::string& text(std::size_t row, std::size_t col) const { return rows[row][col]; }
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view content, std::string source = "<memory>");

// Requires the header to match exactly (order included).
void expect_header(const CsvTable& table, const std::vector<std::string>& expected);

// Shortest decimal that round-trips; deterministic across runs.
std::string format_number(double v);

std::string escape_field(std::string_view field);

}  // namespace bcsmile::io
