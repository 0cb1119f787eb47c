#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bt {

struct CsvRow {
  std::vector<std::string> fields;
  int line = 0;  ///< 1-based source line
};

/// Reads comma-separated rows. Blank lines and lines starting with '#' are
/// skipped, as is a leading header row (detected by a non-numeric last field).
std::vector<CsvRow> read_csv_rows(const std::filesystem::path& path);

double parse_double(const CsvRow& row, std::size_t col);
long parse_long(const CsvRow& row, std::size_t col);

}  // namespace bt
