#pragma once

#include <map>
#include <vector>

#include "json.hpp"

#include "labelvar/analytics/agreement.hpp"
#include "labelvar/analytics/correlation.hpp"
#include "labelvar/analytics/metrics.hpp"
#include "labelvar/analytics/series.hpp"

// JSON views of analytics results, shared by the report writer and the HTTP
// service so both emit identical documents.
namespace labelvar::analytics {

using Json = nlohmann::ordered_json;

Json to_json(const MetricReport& report);
Json to_json(const OverlapRow& row);
Json to_json(const std::vector<OverlapRow>& rows);
Json to_json(const std::map<int, std::size_t>& profile);
Json to_json(const std::vector<Series>& series);
Json cell_to_json(const Cell& cell);
Json keys_to_json(const SelectionSet& selection);

}  // namespace labelvar::analytics
