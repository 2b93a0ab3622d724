#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace admissions::csv {

/// Parsed comma-separated file. Row `i` of `rows` sits on file line
/// `line_numbers[i]` (1-based, header is line 1).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  /// Column position by name, or npos.
  std::size_t column(std::string_view name) const;
};

/// RFC 4180 style: quoted fields may hold commas, quotes ("") and newlines.
/// Throws Error("ParseError") naming the file and line.
Table parse(std::string_view text, const std::string& source = "<memory>");
Table read(const std::filesystem::path& path);

std::string escape(std::string_view field);

/// Fixed six-decimal rendering; negative zero prints as zero.
std::string number(double value);

class Writer {
public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

private:
  std::ostream& out_;
};

double parse_double(std::string_view text, const std::string& where);
long long parse_integer(std::string_view text, const std::string& where);
bool parse_bool(std::string_view text, const std::string& where);

}  // namespace admissions::csv
