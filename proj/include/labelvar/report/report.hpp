#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "labelvar/core/dataset.hpp"
#include "labelvar/core/errors.hpp"
#include "labelvar/report/config.hpp"

namespace labelvar::report {

using Json = nlohmann::ordered_json;

// Thrown (with the original error nested) when one report section fails.
class SectionError : public Error {
 public:
  SectionError(std::string section, const std::string& message);
  const std::string& section() const { return section_; }

 private:
  std::string section_;
};

// Runs the four analysis cycles on a loaded dataset. Agreement and consensus
// columns are derived with the config's tie policy before any section runs.
// The result depends only on its arguments.
Json build_report(const Dataset& dataset, const ReportConfig& config, std::string_view source,
                  std::string_view generated_at);

// Plain-text tables for terminals.
std::string render_text(const Json& report);

// Current time as an ISO-8601 UTC string with seconds precision.
std::string utc_timestamp();

}  // namespace labelvar::report
