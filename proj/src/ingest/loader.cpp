#include "labelvar/ingest/loader.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "labelvar/core/errors.hpp"
#include "labelvar/ingest/csv.hpp"

namespace labelvar::ingest {

namespace {

constexpr std::size_t kMaxCategories = 20;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

ValueKind infer_kind(const std::vector<std::vector<std::string>>& rows, std::size_t col) {
  bool any = false;
  bool all_numeric = true;
  bool all_binary = true;
  std::set<std::string_view> distinct;
  for (const auto& row : rows) {
    const std::string_view field = trim(row[col]);
    if (field.empty()) continue;
    any = true;
    if (distinct.size() <= kMaxCategories) distinct.insert(field);
    if (auto v = parse_number(field)) {
      if (*v != 0.0 && *v != 1.0) all_binary = false;
    } else {
      all_numeric = false;
      all_binary = false;
    }
  }
  if (!any) return ValueKind::text;
  if (all_binary) return ValueKind::binary;
  if (all_numeric) return ValueKind::numeric;
  return distinct.size() <= kMaxCategories ? ValueKind::categorical : ValueKind::text;
}

Cell parse_cell(std::string_view raw, const ColumnSchema& schema, std::size_t line) {
  const std::string_view field = trim(raw);
  if (field.empty()) return Missing{};
  if (schema.value_kind == ValueKind::categorical || schema.value_kind == ValueKind::text)
    return std::string(field);

  auto bad = [&](const char* expectation) {
    return LoadError("line " + std::to_string(line) + ": column '" + schema.name + "' holds '" + std::string(field) +
                         "', expected " + expectation,
                     line, schema.name, std::string(field));
  };
  auto v = parse_number(field);
  switch (schema.value_kind) {
    case ValueKind::binary:
      if (!v || (*v != 0.0 && *v != 1.0)) throw bad("0, 1 or an empty cell");
      break;
    case ValueKind::score:
      if (!v || *v < 0.0 || *v > 1.0) throw bad("a score in [0, 1] or an empty cell");
      break;
    default:
      if (!v) throw bad("a number or an empty cell");
      break;
  }
  return *v;
}

}  // namespace

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

Dataset load(const IngestManifest& manifest) {
  const auto path = manifest.resolved_data_path();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open data file '" + path.string() + "'");
  return load(manifest, in);
}

Dataset load(const IngestManifest& manifest, std::istream& data) {
  const DelimitedTable table = read_delimited(data, manifest.delimiter);

  std::unordered_map<std::string, std::size_t> header_index;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (!header_index.emplace(table.header[i], i).second)
      throw LoadError("duplicate header column '" + table.header[i] + "'", 1, table.header[i]);
  }
  auto header_column = [&](const std::string& name, const char* what) {
    auto it = header_index.find(name);
    if (it == header_index.end()) throw LoadError(std::string(what) + " '" + name + "' is not in the header", 1, name);
    return it->second;
  };

  const std::size_t key_col = header_column(manifest.key_column, "key column");
  std::optional<std::size_t> slice_col;
  if (manifest.slice_column) slice_col = header_column(*manifest.slice_column, "slice column");
  for (const auto& [name, spec] : manifest.column_roles) header_column(name, "column");

  std::vector<ColumnSchema> schema;
  std::vector<std::size_t> source;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i == key_col || (slice_col && i == *slice_col)) continue;
    ColumnSchema col;
    col.name = table.header[i];
    if (auto it = manifest.column_roles.find(col.name); it != manifest.column_roles.end()) {
      const ColumnRoleSpec& spec = it->second;
      col.role = spec.role;
      col.annotator = spec.annotator;
      col.subtype = spec.subtype;
      if (spec.value_kind) {
        col.value_kind = *spec.value_kind;
      } else if (spec.role == ColumnRole::annotation) {
        col.value_kind = ValueKind::binary;
      } else if (spec.role == ColumnRole::prediction) {
        col.value_kind = ValueKind::score;
      } else {
        col.value_kind = infer_kind(table.rows, i);
      }
    } else {
      col.role = ColumnRole::metadata;
      col.value_kind = infer_kind(table.rows, i);
    }
    schema.push_back(std::move(col));
    source.push_back(i);
  }

  std::vector<ScanKey> keys;
  keys.reserve(table.rows.size());
  std::unordered_map<ScanKey, std::size_t, ScanKeyHash> seen;
  std::vector<std::vector<Cell>> columns(schema.size());
  for (auto& c : columns) c.reserve(table.rows.size());

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.lines[r];
    ScanKey key;
    key.scan_id = std::string(trim(row[key_col]));
    if (key.scan_id.empty()) throw LoadError("line " + std::to_string(line) + ": empty scan key", line, manifest.key_column);
    if (slice_col) {
      const std::string_view field = trim(row[*slice_col]);
      auto v = parse_number(field);
      if (!v || *v < 0 || std::floor(*v) != *v || *v > 4294967295.0)
        throw LoadError("line " + std::to_string(line) + ": slice index '" + std::string(field) +
                            "' is not a non-negative integer",
                        line, *manifest.slice_column, std::string(field));
      key.slice_index = static_cast<std::uint32_t>(*v);
    }
    if (auto [it, inserted] = seen.emplace(key, line); !inserted)
      throw LoadError("line " + std::to_string(line) + ": duplicate scan key '" + to_string(key) + "' (first seen on line " +
                          std::to_string(it->second) + ")",
                      line, manifest.key_column, to_string(key));
    keys.push_back(std::move(key));
    for (std::size_t c = 0; c < schema.size(); ++c) columns[c].push_back(parse_cell(row[source[c]], schema[c], line));
  }

  try {
    return Dataset(slice_col ? Level::slice : Level::ct, std::move(schema), std::move(keys), std::move(columns));
  } catch (const SchemaError& e) {
    throw LoadError(e.what());
  }
}

}  // namespace labelvar::ingest
