#include "labelvar/ingest/manifest.hpp"

#include <fstream>

#include "labelvar/core/errors.hpp"

namespace labelvar::ingest {

using nlohmann::json;

namespace {

std::string require_string(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_string())
    throw LoadError(std::string("manifest field '") + key + "' must be a string");
  return doc[key].get<std::string>();
}

std::optional<std::string> optional_string(const json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
  if (!doc[key].is_string()) throw LoadError(std::string("manifest field '") + key + "' must be a string");
  return doc[key].get<std::string>();
}

}  // namespace

std::filesystem::path IngestManifest::resolved_data_path() const {
  if (data_path.is_absolute() || base_dir.empty()) return data_path;
  return base_dir / data_path;
}

std::optional<std::filesystem::path> IngestManifest::resolved_image_root() const {
  if (!image_root) return std::nullopt;
  if (image_root->is_absolute() || base_dir.empty()) return image_root;
  return base_dir / *image_root;
}

IngestManifest manifest_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw LoadError("manifest must be a JSON object");
  IngestManifest m;
  m.base_dir = base_dir;
  m.data_path = require_string(doc, "data_path");
  m.key_column = require_string(doc, "key_column");
  if (auto delim = optional_string(doc, "delimiter")) {
    if (delim->size() != 1) throw LoadError("manifest delimiter must be a single character");
    m.delimiter = (*delim)[0];
  }
  m.slice_column = optional_string(doc, "slice_column");
  if (auto root = optional_string(doc, "image_root")) m.image_root = *root;

  if (doc.contains("column_roles")) {
    const json& roles = doc["column_roles"];
    if (!roles.is_object()) throw LoadError("manifest field 'column_roles' must be an object");
    for (const auto& [name, spec] : roles.items()) {
      if (!spec.is_object()) throw LoadError("column_roles entry '" + name + "' must be an object");
      ColumnRoleSpec role;
      try {
        role.role = parse_column_role(require_string(spec, "role"));
        role.annotator = optional_string(spec, "annotator");
        role.subtype = optional_string(spec, "subtype");
        if (auto kind = optional_string(spec, "value_kind")) role.value_kind = parse_value_kind(*kind);
      } catch (const SchemaError& e) {
        throw LoadError("column_roles entry '" + name + "': " + e.what());
      }
      if (role.role == ColumnRole::annotation && !role.annotator)
        throw LoadError("annotation column '" + name + "' needs an annotator");
      if ((role.role == ColumnRole::annotation || role.role == ColumnRole::prediction) && !role.subtype)
        throw LoadError("column '" + name + "' needs a subtype");
      m.column_roles.emplace(name, std::move(role));
    }
  }
  return m;
}

nlohmann::ordered_json manifest_to_json(const IngestManifest& m) {
  nlohmann::ordered_json doc;
  doc["data_path"] = m.data_path.generic_string();
  doc["delimiter"] = std::string(1, m.delimiter);
  doc["key_column"] = m.key_column;
  doc["slice_column"] = m.slice_column ? nlohmann::ordered_json(*m.slice_column) : nlohmann::ordered_json();
  nlohmann::ordered_json roles = nlohmann::ordered_json::object();
  for (const auto& [name, spec] : m.column_roles) {
    nlohmann::ordered_json entry;
    entry["role"] = std::string(to_string(spec.role));
    if (spec.annotator) entry["annotator"] = *spec.annotator;
    if (spec.subtype) entry["subtype"] = *spec.subtype;
    if (spec.value_kind) entry["value_kind"] = std::string(to_string(*spec.value_kind));
    roles[name] = std::move(entry);
  }
  doc["column_roles"] = std::move(roles);
  doc["image_root"] = m.image_root ? nlohmann::ordered_json(m.image_root->generic_string()) : nlohmann::ordered_json();
  return doc;
}

IngestManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open manifest '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw LoadError("manifest '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return manifest_from_json(doc, path.parent_path());
}

void write_manifest(const IngestManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write manifest '" + path.string() + "'");
  out << manifest_to_json(manifest).dump(2) << '\n';
}

}  // namespace labelvar::ingest
