#include "raildemand/csv.hpp"

#include <cerrno>
#include <cstdlib>
#include <sstream>

#include "raildemand/common.hpp"

namespace raildemand {

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  fail("csv", path + ": missing required column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("io", "cannot open " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  CsvTable table;
  table.path = path;

  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  long line = 1;
  long row_start_line = 1;
  bool row_has_content = false;

  auto end_field = [&]() {
    fields.push_back(field);
    field.clear();
  };
  auto end_row = [&]() {
    end_field();
    if (fields.size() == 1 && fields[0].empty() && !row_has_content) {
      fields.clear();
      return;  // skip fully blank lines
    }
    if (table.header.empty()) {
      table.header = fields;
    } else {
      table.rows.push_back(fields);
      table.line_numbers.push_back(row_start_line);
    }
    fields.clear();
    row_has_content = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        end_field();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        row_start_line = line;
        break;
      default:
        field.push_back(c);
        row_has_content = true;
        break;
    }
  }
  if (in_quotes) fail("csv", path + ": unterminated quoted field");
  if (!field.empty() || row_has_content || !fields.empty()) end_row();

  if (table.header.empty()) fail("csv", path + ": empty file (header row required)");
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      std::ostringstream msg;
      msg << path << ":" << table.line_numbers[r] << ": malformed row, expected "
          << table.header.size() << " fields, got " << table.rows[r].size();
      fail("csv", msg.str());
    }
  }
  return table;
}

static std::string field_context(const CsvTable& t, std::size_t row, const std::string& what) {
  std::ostringstream msg;
  msg << t.path << ":" << t.line_numbers[row] << ": " << what;
  return msg.str();
}

double parse_double_field(const CsvTable& t, std::size_t row, int col, const std::string& what) {
  const std::string& s = t.rows[row][static_cast<std::size_t>(col)];
  if (s.empty()) fail("csv", field_context(t, row, "empty value for " + what));
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end == s.c_str() || *end != '\0')
    fail("csv", field_context(t, row, "malformed number '" + s + "' for " + what));
  return v;
}

long long parse_int_field(const CsvTable& t, std::size_t row, int col, const std::string& what) {
  const std::string& s = t.rows[row][static_cast<std::size_t>(col)];
  if (s.empty()) fail("csv", field_context(t, row, "empty value for " + what));
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || end == s.c_str() || *end != '\0')
    fail("csv", field_context(t, row, "malformed integer '" + s + "' for " + what));
  return v;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary), path_(path) {
  if (!out_) fail("io", "cannot open " + path + " for writing");
}

std::string CsvWriter::escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += "\"\"";
    else quoted.push_back(c);
  }
  quoted.push_back('"');
  return quoted;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_.put(',');
    out_ << escape(fields[i]);
  }
  out_.put('\n');
  if (!out_) fail("io", "write failed: " + path_);
}

}  // namespace raildemand
