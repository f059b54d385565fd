#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "labelvar/core/dataset.hpp"
#include "labelvar/core/selection.hpp"

namespace labelvar::analytics {

struct Correlation {
  double r = 0.0;
  std::size_t pairs = 0;
};

// Product-moment correlation over rows where both cells are present. Throws
// DegenerateInputError with fewer than two pairs or zero variance on either
// side, SchemaError for text cells.
Correlation pearson(std::span<const Cell> x, std::span<const Cell> y);
Correlation pearson(const Dataset& dataset, std::string_view x_column, std::string_view y_column);
Correlation pearson(const Dataset& dataset, const SelectionSet& selection, std::string_view x_column,
                    std::string_view y_column);

}  // namespace labelvar::analytics
