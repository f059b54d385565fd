#include "labelvar/core/errors.hpp"

#include <algorithm>
#include <numeric>

namespace labelvar {

namespace {

std::string unknown_column_message(const std::string& name, const std::string& nearest) {
  std::string msg = "unknown column '" + name + "'";
  if (!nearest.empty()) msg += " (did you mean '" + nearest + "'?)";
  return msg;
}

std::string syntax_message(std::size_t offset, const std::vector<std::string>& expected,
                           const std::string& found) {
  std::string msg = "syntax error at offset " + std::to_string(offset) + ": found " + found;
  if (!expected.empty()) {
    msg += ", expected one of {";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += ", ";
      msg += expected[i];
    }
    msg += "}";
  }
  return msg;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

UnknownColumnError::UnknownColumnError(std::string name, std::string nearest)
    : Error(unknown_column_message(name, nearest)),
      name_(std::move(name)),
      nearest_(std::move(nearest)) {}

LoadError::LoadError(std::string message, std::optional<std::size_t> line, std::string column,
                     std::string value)
    : Error(std::move(message)), line_(line), column_(std::move(column)), value_(std::move(value)) {}

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected, std::string found)
    : Error(syntax_message(offset, expected, found)),
      offset_(offset),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

std::string nearest_name(const std::string& name, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_distance = static_cast<std::size_t>(-1);
  for (const auto& candidate : candidates) {
    const std::size_t d = edit_distance(name, candidate);
    if (d < best_distance) {
      best_distance = d;
      best = candidate;
    }
  }
  return best;
}

}  // namespace labelvar
