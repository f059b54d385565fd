#pragma once

#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include "labelvar/core/dataset.hpp"
#include "labelvar/ingest/loader.hpp"
#include "labelvar/ingest/manifest.hpp"

namespace testing {

inline std::filesystem::path source_dir() { return LABELVAR_SOURCE_DIR; }
inline std::filesystem::path fixture_spec(const char* name) { return source_dir() / "fixtures" / name; }

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("labelvar-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Annotation columns are named <annotator>_<subtype>, predictions pred_<subtype>.
inline labelvar::ingest::IngestManifest panel_manifest(const std::vector<std::string>& annotators,
                                                       const std::vector<std::string>& subtypes) {
  using labelvar::ColumnRole;
  labelvar::ingest::IngestManifest m;
  m.key_column = "scan_id";
  for (const auto& s : subtypes) {
    for (const auto& a : annotators) m.column_roles[a + "_" + s] = {ColumnRole::annotation, a, s, std::nullopt};
    m.column_roles["pred_" + s] = {ColumnRole::prediction, std::nullopt, s, std::nullopt};
  }
  return m;
}

inline labelvar::Dataset load_text(const labelvar::ingest::IngestManifest& m, const std::string& text) {
  std::istringstream in(text);
  return labelvar::ingest::load(m, in);
}

}  // namespace testing
