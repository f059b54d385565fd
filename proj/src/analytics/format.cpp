#include "labelvar/analytics/format.hpp"

#include <cmath>

#include <fmt/format.h>

namespace labelvar::analytics {

std::string format_percent(double ratio) {
  // Work in tenths of a percent; the small bias keeps decimal halves such as
  // 0.9245 from rounding down because of their binary representation.
  const double tenths = std::floor(ratio * 1000.0 + 0.5 + 1e-9);
  return fmt::format("{:.1f}%", tenths / 10.0);
}

}  // namespace labelvar::analytics
