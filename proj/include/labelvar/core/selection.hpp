#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "labelvar/core/dataset.hpp"

namespace labelvar {

// An ordered, duplicate-free set of rows of one dataset, plus a label saying
// where it came from (query text or widget gesture).
class SelectionSet {
 public:
  SelectionSet(std::shared_ptr<const RowSpace> origin, std::vector<std::size_t> rows, std::string provenance);

  static SelectionSet all(const Dataset& dataset, std::string provenance = "all");
  static SelectionSet none(const Dataset& dataset, std::string provenance = "none");
  // Throws SchemaError for keys that are not part of the dataset.
  static SelectionSet from_keys(const Dataset& dataset, std::span<const ScanKey> keys, std::string provenance);

  std::span<const std::size_t> rows() const { return rows_; }
  std::vector<ScanKey> keys() const;
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  bool contains(std::size_t row) const { return row < member_.size() && member_[row]; }
  const std::string& provenance() const { return provenance_; }
  const std::shared_ptr<const RowSpace>& origin() const { return origin_; }
  bool belongs_to(const Dataset& dataset) const { return origin_ == dataset.row_space(); }

  friend bool operator==(const SelectionSet& a, const SelectionSet& b) {
    return a.origin_ == b.origin_ && a.rows_ == b.rows_;
  }

 private:
  std::shared_ptr<const RowSpace> origin_;
  std::vector<std::size_t> rows_;
  std::vector<bool> member_;
  std::string provenance_;
};

// Keys of a that are also in b, in a's order. Throws SelectionMismatchError when
// the selections come from different datasets.
SelectionSet intersect(const SelectionSet& a, const SelectionSet& b);

}  // namespace labelvar
