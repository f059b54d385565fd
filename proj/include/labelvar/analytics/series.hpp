#pragma once

#include <span>
#include <string>
#include <vector>

#include "labelvar/core/dataset.hpp"
#include "labelvar/core/selection.hpp"

namespace labelvar::analytics {

struct SeriesPoint {
  std::size_t row = 0;
  Cell value;  // Missing marks a gap
};

struct Series {
  std::string column;
  std::vector<SeriesPoint> points;
};

// One series per column, points in selection order.
std::vector<Series> scatter_series(const Dataset& dataset, const SelectionSet& selection,
                                   std::span<const std::string> columns);

}  // namespace labelvar::analytics
