#include "labelvar/analytics/series.hpp"

#include "labelvar/core/errors.hpp"

namespace labelvar::analytics {

std::vector<Series> scatter_series(const Dataset& dataset, const SelectionSet& selection,
                                   std::span<const std::string> columns) {
  if (!selection.belongs_to(dataset)) throw SelectionMismatchError("selection was not produced from this dataset");
  std::vector<Series> out;
  out.reserve(columns.size());
  for (const auto& name : columns) {
    const auto values = dataset.values(name);
    Series s{name, {}};
    s.points.reserve(selection.size());
    for (std::size_t row : selection.rows()) s.points.push_back({row, values[row]});
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace labelvar::analytics
