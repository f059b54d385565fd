#include "labelvar/core/selection.hpp"

#include "labelvar/core/errors.hpp"

namespace labelvar {

SelectionSet::SelectionSet(std::shared_ptr<const RowSpace> origin, std::vector<std::size_t> rows,
                           std::string provenance)
    : origin_(std::move(origin)), member_(origin_ ? origin_->size() : 0, false), provenance_(std::move(provenance)) {
  if (!origin_) throw SchemaError("selection without an originating dataset");
  rows_.reserve(rows.size());
  for (std::size_t row : rows) {
    if (row >= member_.size())
      throw SchemaError("selection row " + std::to_string(row) + " is outside the dataset");
    if (member_[row]) continue;
    member_[row] = true;
    rows_.push_back(row);
  }
}

SelectionSet SelectionSet::all(const Dataset& dataset, std::string provenance) {
  std::vector<std::size_t> rows(dataset.row_count());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return SelectionSet(dataset.row_space(), std::move(rows), std::move(provenance));
}

SelectionSet SelectionSet::none(const Dataset& dataset, std::string provenance) {
  return SelectionSet(dataset.row_space(), {}, std::move(provenance));
}

SelectionSet SelectionSet::from_keys(const Dataset& dataset, std::span<const ScanKey> keys,
                                     std::string provenance) {
  std::vector<std::size_t> rows;
  rows.reserve(keys.size());
  for (const auto& key : keys) {
    auto row = dataset.find_row(key);
    if (!row) throw SchemaError("scan key '" + to_string(key) + "' is not part of the dataset");
    rows.push_back(*row);
  }
  return SelectionSet(dataset.row_space(), std::move(rows), std::move(provenance));
}

std::vector<ScanKey> SelectionSet::keys() const {
  std::vector<ScanKey> out;
  out.reserve(rows_.size());
  for (std::size_t row : rows_) out.push_back(origin_->keys()[row]);
  return out;
}

SelectionSet intersect(const SelectionSet& a, const SelectionSet& b) {
  if (a.origin() != b.origin()) throw SelectionMismatchError("cannot intersect selections from different datasets");
  std::vector<std::size_t> rows;
  for (std::size_t row : a.rows()) {
    if (b.contains(row)) rows.push_back(row);
  }
  return SelectionSet(a.origin(), std::move(rows), a.provenance() + " & " + b.provenance());
}

}  // namespace labelvar
