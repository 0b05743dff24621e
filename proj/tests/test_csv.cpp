#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "hetbias/csv.hpp"
#include "hetbias/errors.hpp"
#include "hetbias/numeric.hpp"

using namespace hetbias;

namespace {

const char *kCanonical =
    "# tool=demo\n"
    "# rows=2\n"
    "a,b_plus,b_minus\n"
    "0,1.5,-2.25\n"
    "0.10000000000000001,nan,3\n";

}  // namespace

TEST_CASE("parse then emit reproduces canonical text byte for byte") {
  const CsvTable table = parse_csv(kCanonical);
  CHECK(table.prelude.size() == 2);
  CHECK(table.prelude[0] == "# tool=demo");
  CHECK(table.prelude[1] == "# rows=2");
  CHECK(table.header == std::vector<std::string>{"a", "b_plus", "b_minus"});
  CHECK(table.rows.size() == 2);
  CHECK(table.rows[1][1] == "nan");
  CHECK(emit_csv(table) == kCanonical);
}

TEST_CASE("doubles survive a format/parse/format round trip") {
  const std::vector<double> values = {0.1, 1.0 / 3.0, -2.5e-17, 9007199254740993.0,
                                      1e308, -0.0};
  for (double v : values) {
    const std::string text = format_double(v);
    char *end = nullptr;
    const double back = std::strtod(text.c_str(), &end);
    CHECK(*end == '\0');
    CHECK(back == v);
    CHECK(format_double(back) == text);
  }
}

TEST_CASE("numeric_column extracts doubles and honors nan markers") {
  const CsvTable table = parse_csv(kCanonical);
  const Eigen::VectorXd col = numeric_column(table, "b_plus");
  CHECK(col.size() == 2);
  CHECK(col[0] == 1.5);
  CHECK(std::isnan(col[1]));
  CHECK(column_index(table, "b_minus") == 2);
  CHECK_THROWS_AS((void)column_index(table, "missing"), InvalidInput);
  CHECK_THROWS_AS((void)numeric_column(table, "missing"), InvalidInput);
}

TEST_CASE("malformed inputs are rejected") {
  CHECK_THROWS_AS((void)parse_csv("a,b\n1,2,3\n"), InvalidInput);  // ragged row
  CHECK_THROWS_AS((void)parse_csv(""), InvalidInput);              // no header
  CHECK_THROWS_AS((void)parse_csv("# only prelude\n"), InvalidInput);
  const CsvTable empty_cell = parse_csv("a,b\n1,\n");
  CHECK_THROWS_AS((void)numeric_column(empty_cell, "b"), InvalidInput);
  const CsvTable words = parse_csv("a,b\n1,two\n");
  CHECK_THROWS_AS((void)numeric_column(words, "b"), InvalidInput);
}

TEST_CASE("carriage returns and blank lines are tolerated on input") {
  const CsvTable table = parse_csv("# p=1\r\na,b\r\n\r\n1,2\r\n\n3,4\r\n");
  CHECK(table.prelude == std::vector<std::string>{"# p=1"});
  CHECK(table.header == std::vector<std::string>{"a", "b"});
  CHECK(table.rows.size() == 2);
  CHECK(table.rows[0] == std::vector<std::string>{"1", "2"});
  CHECK(table.rows[1] == std::vector<std::string>{"3", "4"});
}

TEST_CASE("file write and parse round trip") {
  const CsvTable table = parse_csv(kCanonical);
  const std::string path = "csv_roundtrip_tmp.csv";
  write_csv_file(table, path);
  const CsvTable back = parse_csv_file(path);
  CHECK(emit_csv(back) == kCanonical);
  std::remove(path.c_str());
  CHECK_THROWS_AS((void)parse_csv_file("does_not_exist_anywhere.csv"), InvalidInput);
}
