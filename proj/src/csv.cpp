#include "hetbias/csv.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hetbias/errors.hpp"

namespace hetbias {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!seen_header) {
      if (line.empty()) continue;
      if (line.front() == '#') {
        table.prelude.push_back(line);
        continue;
      }
      table.header = split_line(line);
      seen_header = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != table.header.size()) {
      throw InvalidInput("csv row has " + std::to_string(cells.size()) +
                         " cells, header has " +
                         std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (!seen_header) throw InvalidInput("csv input has no header row");
  return table;
}

CsvTable parse_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open csv file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string emit_csv(const CsvTable& table) {
  std::ostringstream out;
  for (const std::string& line : table.prelude) out << line << '\n';
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i > 0) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const std::vector<std::string>& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  return out.str();
}

void write_csv_file(const CsvTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write csv file: " + path);
  out << emit_csv(table);
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == name) return i;
  }
  throw InvalidInput("csv column not found: " + name);
}

Eigen::VectorXd numeric_column(const CsvTable& table, const std::string& name) {
  const std::size_t col = column_index(table, name);
  Eigen::VectorXd out(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& cell = table.rows[r][col];
    if (cell.empty()) {
      throw InvalidInput("empty cell in column '" + name + "' row " +
                         std::to_string(r + 1));
    }
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
      throw InvalidInput("non-numeric cell '" + cell + "' in column '" + name +
                         "' row " + std::to_string(r + 1));
    }
    out(static_cast<Eigen::Index>(r)) = value;
  }
  return out;
}

}  // namespace hetbias
