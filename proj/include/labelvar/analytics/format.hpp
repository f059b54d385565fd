#pragma once

#include <string>

namespace labelvar::analytics {

// Ratio as a percentage with one decimal, rounded half up: 11/13 -> "84.6%".
std::string format_percent(double ratio);

}  // namespace labelvar::analytics
