#include "hybridnet/csv.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "hybridnet/error.h"

namespace hybridnet {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

CsvTable CsvTable::parse(std::istream& in, const std::string& source) {
  CsvTable t;
  t.source_ = source;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    auto fields = split_csv_line(trimmed);
    if (!have_header) {
      t.header_ = fields;
      for (std::size_t i = 0; i < fields.size(); ++i) t.index_[fields[i]] = i;
      have_header = true;
      continue;
    }
    if (fields.size() != t.header_.size()) {
      throw InputError(source + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(t.header_.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    t.rows_.push_back(std::move(fields));
    t.line_numbers_.push_back(line_no);
  }
  if (!have_header) throw InputError(source + ": missing header");
  return t;
}

CsvTable CsvTable::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return parse(in, path);
}

bool CsvTable::has_column(std::string_view name) const {
  return index_.count(std::string(name)) > 0;
}

std::size_t CsvTable::column_index(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    throw InputError(source_ + ": missing column '" + std::string(name) + "'");
  }
  return it->second;
}

const std::string& CsvTable::text(std::size_t row, std::string_view column) const {
  return rows_.at(row)[column_index(column)];
}

double CsvTable::number(std::size_t row, std::string_view column) const {
  auto v = optional_number(row, column);
  if (!v) {
    throw InputError(source_ + ":" + std::to_string(line_numbers_.at(row)) +
                     ": empty value in column '" + std::string(column) + "'");
  }
  return *v;
}

std::optional<double> CsvTable::optional_number(std::size_t row,
                                                std::string_view column) const {
  if (!has_column(column)) return std::nullopt;
  const std::string& s = text(row, column);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError(source_ + ":" + std::to_string(line_numbers_.at(row)) +
                     ": not a number in column '" + std::string(column) +
                     "': " + s);
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace hybridnet
