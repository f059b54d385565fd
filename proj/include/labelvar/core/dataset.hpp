#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace labelvar {

// Marker for an absent cell. Distinct from 0 and 0.0 everywhere.
struct Missing {
  friend bool operator==(Missing, Missing) { return true; }
};

using Cell = std::variant<Missing, double, std::string>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<Missing>(c); }
inline const double* number_if(const Cell& c) { return std::get_if<double>(&c); }
std::string cell_to_string(const Cell& c);

struct ScanKey {
  std::string scan_id;
  std::optional<std::uint32_t> slice_index;

  friend auto operator<=>(const ScanKey&, const ScanKey&) = default;
  friend bool operator==(const ScanKey&, const ScanKey&) = default;
};

std::string to_string(const ScanKey& key);

struct ScanKeyHash {
  std::size_t operator()(const ScanKey& k) const noexcept;
};

enum class ColumnRole { annotation, prediction, metadata, derived };
enum class ValueKind { binary, score, numeric, categorical, text };
enum class Level { slice, ct };

std::string_view to_string(ColumnRole role);
std::string_view to_string(ValueKind kind);
std::string_view to_string(Level level);
ColumnRole parse_column_role(std::string_view text);
ValueKind parse_value_kind(std::string_view text);

struct ColumnSchema {
  std::string name;
  ColumnRole role = ColumnRole::metadata;
  std::optional<std::string> annotator;
  std::optional<std::string> subtype;
  ValueKind value_kind = ValueKind::text;

  friend bool operator==(const ColumnSchema&, const ColumnSchema&) = default;
};

// Keys of a dataset in row order. Datasets that only differ by derived columns
// share one RowSpace, which is what selections are validated against.
class RowSpace {
 public:
  explicit RowSpace(std::vector<ScanKey> keys);

  std::span<const ScanKey> keys() const { return keys_; }
  std::size_t size() const { return keys_.size(); }
  std::optional<std::size_t> find(const ScanKey& key) const;

 private:
  std::vector<ScanKey> keys_;
  std::unordered_map<ScanKey, std::size_t, ScanKeyHash> index_;
};

struct NewColumn {
  ColumnSchema schema;
  std::vector<Cell> values;
};

// Immutable table of scans. Storage is column-major and shared between copies,
// so copying a Dataset or adding a derived column never duplicates cells.
class Dataset {
 public:
  Dataset();
  Dataset(Level level, std::vector<ColumnSchema> schema, std::vector<ScanKey> keys,
          std::vector<std::vector<Cell>> columns);

  Level level() const { return level_; }
  std::size_t row_count() const { return rows_->size(); }
  std::size_t column_count() const { return schema_.size(); }
  const std::vector<ColumnSchema>& schema() const { return schema_; }
  std::vector<std::string> column_names() const;

  std::optional<std::size_t> find_column(std::string_view name) const;
  // Throws UnknownColumnError naming the closest existing column.
  std::size_t column_index(std::string_view name) const;
  const ColumnSchema& column_schema(std::string_view name) const;
  std::span<const Cell> values(std::size_t column) const { return *columns_[column]; }
  std::span<const Cell> values(std::string_view name) const { return values(column_index(name)); }

  std::span<const ScanKey> keys() const { return rows_->keys(); }
  const ScanKey& key(std::size_t row) const { return rows_->keys()[row]; }
  std::optional<std::size_t> find_row(const ScanKey& key) const { return rows_->find(key); }
  const std::shared_ptr<const RowSpace>& row_space() const { return rows_; }

  // Annotation columns for a subtype, in schema order.
  std::vector<std::size_t> annotation_columns(std::string_view subtype) const;
  std::vector<std::size_t> columns_with_role(ColumnRole role) const;
  // Subtypes that have at least one annotation column, in first-seen order.
  std::vector<std::string> annotated_subtypes() const;

  // Returns a new dataset with the given columns appended. A column whose name
  // matches an existing derived column replaces it; any other clash is an error.
  Dataset with_columns(std::vector<NewColumn> added) const;

  // The given rows (in that order) as a standalone dataset with its own RowSpace.
  Dataset subset(std::span<const std::size_t> rows) const;

  // SHA-256 over level, schema, keys and every cell, hex encoded.
  std::string fingerprint() const;

 private:
  Dataset(Level level, std::vector<ColumnSchema> schema, std::shared_ptr<const RowSpace> rows,
          std::vector<std::shared_ptr<const std::vector<Cell>>> columns);
  void validate_column(const ColumnSchema& schema, const std::vector<Cell>& values) const;
  void build_index();

  Level level_ = Level::ct;
  std::vector<ColumnSchema> schema_;
  std::shared_ptr<const RowSpace> rows_;
  std::vector<std::shared_ptr<const std::vector<Cell>>> columns_;
  std::unordered_map<std::string, std::size_t> name_index_;
};

}  // namespace labelvar
