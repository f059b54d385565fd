#include "labelvar/analytics/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "labelvar/core/errors.hpp"

namespace labelvar::analytics {

namespace {

double numeric(const Cell& c, const char* side) {
  if (const double* v = number_if(c)) return *v;
  throw SchemaError(std::string("pearson: ") + side + " column holds text '" + cell_to_string(c) + "'");
}

Correlation pearson_rows(std::span<const Cell> x, std::span<const Cell> y, std::span<const std::size_t> rows) {
  std::vector<double> xs, ys;
  xs.reserve(rows.size());
  ys.reserve(rows.size());
  for (std::size_t r : rows) {
    if (is_missing(x[r]) || is_missing(y[r])) continue;
    xs.push_back(numeric(x[r], "x"));
    ys.push_back(numeric(y[r], "y"));
  }
  const std::size_t n = xs.size();
  if (n < 2) throw DegenerateInputError("pearson needs at least two complete pairs, got " + std::to_string(n));

  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInputError("pearson is undefined for a constant column");
  const double r = sxy / std::sqrt(sxx * syy);
  return Correlation{std::clamp(r, -1.0, 1.0), n};
}

}  // namespace

Correlation pearson(std::span<const Cell> x, std::span<const Cell> y) {
  if (x.size() != y.size()) throw SchemaError("pearson: columns differ in length");
  std::vector<std::size_t> rows(x.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return pearson_rows(x, y, rows);
}

Correlation pearson(const Dataset& dataset, std::string_view x_column, std::string_view y_column) {
  return pearson(dataset.values(x_column), dataset.values(y_column));
}

Correlation pearson(const Dataset& dataset, const SelectionSet& selection, std::string_view x_column,
                    std::string_view y_column) {
  if (!selection.belongs_to(dataset)) throw SelectionMismatchError("selection was not produced from this dataset");
  return pearson_rows(dataset.values(x_column), dataset.values(y_column), selection.rows());
}

}  // namespace labelvar::analytics
