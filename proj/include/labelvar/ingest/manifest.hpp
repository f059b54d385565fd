#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "labelvar/core/dataset.hpp"

namespace labelvar::ingest {

struct ColumnRoleSpec {
  ColumnRole role = ColumnRole::metadata;
  std::optional<std::string> annotator;
  std::optional<std::string> subtype;
  // Inferred from the data when absent.
  std::optional<ValueKind> value_kind;
};

// Describes how to read one delimited data file. Relative paths are resolved
// against base_dir, which is the manifest file's directory when read from disk.
struct IngestManifest {
  std::filesystem::path data_path;
  char delimiter = ',';
  std::string key_column;
  std::optional<std::string> slice_column;
  std::map<std::string, ColumnRoleSpec> column_roles;
  std::optional<std::filesystem::path> image_root;
  std::filesystem::path base_dir;

  std::filesystem::path resolved_data_path() const;
  std::optional<std::filesystem::path> resolved_image_root() const;
};

IngestManifest manifest_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::ordered_json manifest_to_json(const IngestManifest& manifest);
IngestManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const IngestManifest& manifest, const std::filesystem::path& path);

}  // namespace labelvar::ingest
