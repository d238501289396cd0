#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sse {

// Numeric table with a header row. Empty tables keep their header.
struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd data;

  // Column index by name, or -1.
  int column(const std::string& name) const;
};

// Errors name the offending line: "line 7: expected 3 fields, got 2".
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

void write_csv(std::ostream& out, const CsvTable& table);

// Shortest text that parses back to the same double.
std::string format_double(double v);

} // namespace sse
