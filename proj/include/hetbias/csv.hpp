#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hetbias {

// Minimal CSV with a comment prelude. Lines starting with '#' before
// the header carry "# key=value" metadata; the first non-comment line
// is the header; every later line is a data row. Cells are kept as the
// exact strings read, so parse -> emit is the identity.
struct CsvTable {
  std::vector<std::string> prelude;  // full '#' lines, verbatim
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(const std::string& text);
CsvTable parse_csv_file(const std::string& path);

std::string emit_csv(const CsvTable& table);
void write_csv_file(const CsvTable& table, const std::string& path);

// Index of a named column; throws InvalidInput when absent.
std::size_t column_index(const CsvTable& table, const std::string& name);

// Parse a whole column as doubles; empty or non-numeric cells are hard
// errors (no imputation).
Eigen::VectorXd numeric_column(const CsvTable& table, const std::string& name);

}  // namespace hetbias
