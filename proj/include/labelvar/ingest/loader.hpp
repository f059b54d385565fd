#pragma once

#include <istream>
#include <optional>
#include <string_view>

#include "labelvar/core/dataset.hpp"
#include "labelvar/ingest/manifest.hpp"

namespace labelvar::ingest {

// Loads the manifest's data file. Columns named in column_roles take that role;
// every other column (except the key and slice columns) becomes metadata with
// an inferred value kind. Throws LoadError for I/O problems, malformed rows
// (with line number) and cells that violate their column's value kind.
Dataset load(const IngestManifest& manifest);
Dataset load(const IngestManifest& manifest, std::istream& data);

// Strict number parsing shared by the loader and the query lexer: the whole
// field must be a finite decimal number.
std::optional<double> parse_number(std::string_view text);

}  // namespace labelvar::ingest
