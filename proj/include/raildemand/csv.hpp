#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace raildemand {

// Minimal RFC-4180-style CSV support: quoted fields, embedded commas and
// newlines, UTF-8 passthrough. Line numbers refer to the physical line on
// which a row starts (1-based, header included).
struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<long> line_numbers;

  // Index of a header column; throws naming the file when absent.
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

// Field parsers with file/line context in error messages.
double parse_double_field(const CsvTable& t, std::size_t row, int col, const std::string& what);
long long parse_int_field(const CsvTable& t, std::size_t row, int col, const std::string& what);

class CsvWriter {
public:
  explicit CsvWriter(const std::string& path);
  void row(const std::vector<std::string>& fields);
  static std::string escape(const std::string& field);

private:
  std::ofstream out_;
  std::string path_;
};

}  // namespace raildemand
