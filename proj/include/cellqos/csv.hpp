#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cellqos {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Comma-separated table; lines starting with '#' and blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
  double number(std::size_t row, std::size_t col) const;
};

CsvTable read_csv(std::istream& in);

// Shortest representation that round-trips; "inf"/"-inf"/"nan" otherwise.
std::string format_double(double v);

double parse_double(std::string_view text);

}  // namespace cellqos
