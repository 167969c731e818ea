#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hybridnet {

// Minimal reader for header-led, comma-separated files. Fields are trimmed;
// double-quoted fields may contain commas. Blank lines and lines starting
// with '#' are skipped.
class CsvTable {
 public:
  static CsvTable parse(std::istream& in, const std::string& source = "<csv>");
  static CsvTable read_file(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  bool has_column(std::string_view name) const;

  // Throws InputError naming the source and line when the column is missing
  // or the cell does not parse.
  const std::string& text(std::size_t row, std::string_view column) const;
  double number(std::size_t row, std::string_view column) const;
  // Empty cells and absent columns yield nullopt.
  std::optional<double> optional_number(std::size_t row,
                                        std::string_view column) const;

 private:
  std::size_t column_index(std::string_view name) const;

  std::string source_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> line_numbers_;
};

std::vector<std::string> split_csv_line(std::string_view line);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace hybridnet
