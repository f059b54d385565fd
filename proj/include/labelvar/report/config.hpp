#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "labelvar/core/dataset.hpp"
#include "labelvar/ingest/derive.hpp"

namespace labelvar::report {

// Text fields may contain "{subtype}", replaced per subtype before use. The
// report records the expanded text, so it can be replayed verbatim.

struct ScatterConfig {
  std::string query;
  std::vector<std::string> columns;
};

struct CycleIConfig {
  std::string subtype;
  std::string pred_column = "pred_{subtype}";
  std::optional<ScatterConfig> scatter;
};

struct CycleIIConfig {
  std::string x_column = "agree_count_{subtype}";
  std::string y_column = "pred_{subtype}";
  std::string subtype;
};

struct CycleIIIConfig {
  std::vector<std::string> subtypes;
  std::string gt_column = "consensus_{subtype}";
  std::string pred_column = "pred_{subtype}";
  std::string unanimous_query = "agree_prop_{subtype} == 0 or agree_prop_{subtype} == 1";
  std::string disputed_query = "agree_prop_{subtype} < 1";
};

struct Comparison {
  std::string gt_column;
  std::string pred_column;
};

struct CycleIVConfig {
  std::string profile_subtype;
  std::vector<Comparison> comparisons;
  std::vector<std::string> queries;
};

struct ReportConfig {
  double threshold = 0.5;
  ingest::TiePolicy tie_policy = ingest::TiePolicy::positive;
  CycleIConfig cycle_I;
  CycleIIConfig cycle_II;
  CycleIIIConfig cycle_III;
  CycleIVConfig cycle_IV;
};

// Missing keys keep their defaults; empty subtype fields are filled in by
// resolve(). Throws SchemaError on malformed values.
ReportConfig report_config_from_json(const nlohmann::json& doc);
ReportConfig read_report_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const ReportConfig& config);

// Fills unset subtypes from the dataset's annotated subtypes (the first one for
// single-subtype sections, all of them for cycle III).
ReportConfig resolve(ReportConfig config, const Dataset& dataset);

std::string expand(std::string_view text, std::string_view subtype);

}  // namespace labelvar::report
