#include "labelvar/ingest/csv.hpp"

#include <istream>
#include <ostream>

#include "labelvar/core/errors.hpp"

namespace labelvar::ingest {

namespace {

// Splits one logical record. Returns false at end of input.
bool next_record(std::istream& in, char delimiter, std::vector<std::string>& fields, std::size_t& line,
                 std::size_t& record_line) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  record_line = line;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      in_quotes = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      // tolerate CRLF
    } else if (c == '\n') {
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else {
      field += c;
    }
  }
  if (in_quotes) throw LoadError("unterminated quoted field", record_line);
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

bool blank(const std::vector<std::string>& fields) { return fields.size() == 1 && fields[0].empty(); }

}  // namespace

DelimitedTable read_delimited(std::istream& in, char delimiter) {
  DelimitedTable table;
  std::size_t line = 1;
  std::size_t record_line = 1;
  std::vector<std::string> fields;

  while (next_record(in, delimiter, fields, line, record_line)) {
    if (blank(fields)) continue;
    table.header = fields;
    break;
  }
  if (table.header.empty()) throw LoadError("missing header row");
  if (!table.header.empty() && table.header[0].starts_with("\xEF\xBB\xBF")) table.header[0].erase(0, 3);

  while (next_record(in, delimiter, fields, line, record_line)) {
    if (blank(fields)) continue;
    if (fields.size() != table.header.size())
      throw LoadError("line " + std::to_string(record_line) + ": expected " + std::to_string(table.header.size()) +
                          " cells, found " + std::to_string(fields.size()),
                      record_line);
    table.rows.push_back(fields);
    table.lines.push_back(record_line);
  }
  return table;
}

void write_delimited_row(std::ostream& out, std::span<const std::string> fields, char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << delimiter;
    const std::string& f = fields[i];
    if (f.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string::npos) {
      out << f;
      continue;
    }
    out << '"';
    for (char c : f) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  }
  out << '\n';
}

}  // namespace labelvar::ingest
