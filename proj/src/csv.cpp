#include "bt/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "bt/error.hpp"

namespace bt {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  double v;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

std::vector<CsvRow> read_csv_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("io", "cannot open " + path.string());
  std::vector<CsvRow> rows;
  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    CsvRow row{{}, line_no};
    std::stringstream s(t);
    std::string field;
    while (std::getline(s, field, ',')) row.fields.push_back(trim(field));
    if (first && !is_number(row.fields.back())) {
      first = false;
      continue;
    }
    first = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_double(const CsvRow& row, std::size_t col) {
  if (col >= row.fields.size())
    throw io_error("io", "line " + std::to_string(row.line) + ": missing column " + std::to_string(col));
  const auto& f = row.fields[col];
  double v = 0.0;
  auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || p != f.data() + f.size())
    throw io_error("io", "line " + std::to_string(row.line) + ": not a number: '" + f + "'");
  return v;
}

long parse_long(const CsvRow& row, std::size_t col) {
  if (col >= row.fields.size())
    throw io_error("io", "line " + std::to_string(row.line) + ": missing column " + std::to_string(col));
  const auto& f = row.fields[col];
  long v = 0;
  auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || p != f.data() + f.size())
    throw io_error("io", "line " + std::to_string(row.line) + ": not an integer: '" + f + "'");
  return v;
}

}  // namespace bt
