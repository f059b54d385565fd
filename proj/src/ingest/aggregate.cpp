#include "labelvar/ingest/aggregate.hpp"

#include <unordered_map>

namespace labelvar::ingest {

Dataset aggregate_to_ct(const Dataset& dataset) {
  if (dataset.level() == Level::ct) return dataset;

  std::vector<std::string> scan_order;
  std::unordered_map<std::string, std::vector<std::size_t>> slices;
  for (std::size_t r = 0; r < dataset.row_count(); ++r) {
    const std::string& id = dataset.key(r).scan_id;
    auto [it, inserted] = slices.try_emplace(id);
    if (inserted) scan_order.push_back(id);
    it->second.push_back(r);
  }

  std::vector<ColumnSchema> schema;
  std::vector<std::vector<Cell>> columns;
  for (std::size_t c = 0; c < dataset.column_count(); ++c) {
    const ColumnSchema& col = dataset.schema()[c];
    if (col.role == ColumnRole::derived) continue;
    const auto values = dataset.values(c);
    const bool take_max = col.role == ColumnRole::annotation || col.role == ColumnRole::prediction;

    std::vector<Cell> out;
    out.reserve(scan_order.size());
    for (const auto& id : scan_order) {
      const auto& rows = slices.at(id);
      if (take_max) {
        Cell best = Missing{};
        for (std::size_t r : rows) {
          const double* v = number_if(values[r]);
          if (!v) continue;
          const double* cur = number_if(best);
          if (!cur || *v > *cur) best = *v;
        }
        out.push_back(std::move(best));
      } else {
        std::size_t first = rows.front();
        for (std::size_t r : rows) {
          if (dataset.key(r).slice_index < dataset.key(first).slice_index) first = r;
        }
        out.push_back(values[first]);
      }
    }
    schema.push_back(col);
    columns.push_back(std::move(out));
  }

  std::vector<ScanKey> keys;
  keys.reserve(scan_order.size());
  for (auto& id : scan_order) keys.push_back(ScanKey{std::move(id), std::nullopt});
  return Dataset(Level::ct, std::move(schema), std::move(keys), std::move(columns));
}

}  // namespace labelvar::ingest
