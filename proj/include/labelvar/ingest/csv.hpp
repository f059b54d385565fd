#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace labelvar::ingest {

struct DelimitedTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based source line on which each row starts.
  std::vector<std::size_t> lines;
};

// Reads a delimited file with a mandatory header row. Fields may be quoted with
// double quotes ("" escapes a quote). Blank lines are skipped. A row whose cell
// count differs from the header raises LoadError carrying the line number.
DelimitedTable read_delimited(std::istream& in, char delimiter = ',');

void write_delimited_row(std::ostream& out, std::span<const std::string> fields, char delimiter = ',');

}  // namespace labelvar::ingest
