#include "labelvar/core/dataset.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <unordered_set>

#include "labelvar/core/errors.hpp"

namespace labelvar {

namespace {

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr);
  }
  void update(std::string_view bytes) { EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size()); }
  // Length-prefixed so that field boundaries are unambiguous.
  void field(std::string_view bytes) {
    update(std::to_string(bytes.size()));
    update(":");
    update(bytes);
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), digest.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[digest[i] >> 4];
      out += kHex[digest[i] & 0xf];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string cell_to_string(const Cell& c) {
  if (const double* d = number_if(c)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return {};
}

std::string to_string(const ScanKey& key) {
  if (!key.slice_index) return key.scan_id;
  return key.scan_id + "#" + std::to_string(*key.slice_index);
}

std::size_t ScanKeyHash::operator()(const ScanKey& k) const noexcept {
  std::size_t h = std::hash<std::string>{}(k.scan_id);
  if (k.slice_index) h ^= std::hash<std::uint32_t>{}(*k.slice_index) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::string_view to_string(ColumnRole role) {
  switch (role) {
    case ColumnRole::annotation: return "annotation";
    case ColumnRole::prediction: return "prediction";
    case ColumnRole::metadata: return "metadata";
    case ColumnRole::derived: return "derived";
  }
  return "metadata";
}

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::binary: return "binary";
    case ValueKind::score: return "score";
    case ValueKind::numeric: return "numeric";
    case ValueKind::categorical: return "categorical";
    case ValueKind::text: return "text";
  }
  return "text";
}

std::string_view to_string(Level level) { return level == Level::slice ? "slice" : "ct"; }

ColumnRole parse_column_role(std::string_view text) {
  if (text == "annotation") return ColumnRole::annotation;
  if (text == "prediction") return ColumnRole::prediction;
  if (text == "metadata") return ColumnRole::metadata;
  if (text == "derived") return ColumnRole::derived;
  throw SchemaError("unknown column role '" + std::string(text) + "'");
}

ValueKind parse_value_kind(std::string_view text) {
  if (text == "binary") return ValueKind::binary;
  if (text == "score") return ValueKind::score;
  if (text == "numeric") return ValueKind::numeric;
  if (text == "categorical") return ValueKind::categorical;
  if (text == "text") return ValueKind::text;
  throw SchemaError("unknown value kind '" + std::string(text) + "'");
}

RowSpace::RowSpace(std::vector<ScanKey> keys) : keys_(std::move(keys)) {
  index_.reserve(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i].scan_id.empty()) throw SchemaError("row " + std::to_string(i) + " has an empty scan_id");
    if (!index_.emplace(keys_[i], i).second)
      throw SchemaError("duplicate scan key '" + to_string(keys_[i]) + "'");
  }
}

std::optional<std::size_t> RowSpace::find(const ScanKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Dataset::Dataset() : rows_(std::make_shared<RowSpace>(std::vector<ScanKey>{})) {}

Dataset::Dataset(Level level, std::vector<ColumnSchema> schema, std::vector<ScanKey> keys,
                 std::vector<std::vector<Cell>> columns)
    : level_(level), schema_(std::move(schema)), rows_(std::make_shared<RowSpace>(std::move(keys))) {
  if (columns.size() != schema_.size())
    throw SchemaError("schema has " + std::to_string(schema_.size()) + " columns but " +
                      std::to_string(columns.size()) + " were supplied");
  for (const auto& key : rows_->keys()) {
    if (level_ == Level::ct && key.slice_index)
      throw SchemaError("CT-level dataset contains slice key '" + to_string(key) + "'");
  }
  columns_.reserve(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    validate_column(schema_[c], columns[c]);
    columns_.push_back(std::make_shared<const std::vector<Cell>>(std::move(columns[c])));
  }
  build_index();
}

Dataset::Dataset(Level level, std::vector<ColumnSchema> schema, std::shared_ptr<const RowSpace> rows,
                 std::vector<std::shared_ptr<const std::vector<Cell>>> columns)
    : level_(level), schema_(std::move(schema)), rows_(std::move(rows)), columns_(std::move(columns)) {
  build_index();
}

void Dataset::build_index() {
  name_index_.clear();
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].name.empty()) throw SchemaError("column " + std::to_string(c) + " has an empty name");
    if (!name_index_.emplace(schema_[c].name, c).second)
      throw SchemaError("duplicate column name '" + schema_[c].name + "'");
  }
}

void Dataset::validate_column(const ColumnSchema& schema, const std::vector<Cell>& values) const {
  const std::string& name = schema.name;
  if (values.size() != rows_->size())
    throw SchemaError("column '" + name + "' has " + std::to_string(values.size()) + " cells, expected " +
                      std::to_string(rows_->size()));
  if (schema.role == ColumnRole::annotation) {
    if (!schema.annotator || schema.annotator->empty())
      throw SchemaError("annotation column '" + name + "' has no annotator");
    if (schema.value_kind != ValueKind::binary)
      throw SchemaError("annotation column '" + name + "' must be binary");
  } else if (schema.annotator) {
    throw SchemaError("column '" + name + "' carries an annotator but is not an annotation column");
  }
  if ((schema.role == ColumnRole::annotation || schema.role == ColumnRole::prediction) &&
      (!schema.subtype || schema.subtype->empty()))
    throw SchemaError("column '" + name + "' requires a subtype");
  if (schema.role == ColumnRole::prediction && schema.value_kind != ValueKind::score)
    throw SchemaError("prediction column '" + name + "' must hold scores");

  for (std::size_t r = 0; r < values.size(); ++r) {
    const Cell& cell = values[r];
    if (is_missing(cell)) continue;
    const double* d = number_if(cell);
    switch (schema.value_kind) {
      case ValueKind::binary:
        if (!d || (*d != 0.0 && *d != 1.0))
          throw SchemaError("binary column '" + name + "' holds '" + cell_to_string(cell) + "' at row " +
                            std::to_string(r));
        break;
      case ValueKind::score:
        if (!d || !(*d >= 0.0 && *d <= 1.0))
          throw SchemaError("score column '" + name + "' holds '" + cell_to_string(cell) + "' at row " +
                            std::to_string(r));
        break;
      case ValueKind::numeric:
        if (!d) throw SchemaError("numeric column '" + name + "' holds text at row " + std::to_string(r));
        break;
      case ValueKind::categorical:
      case ValueKind::text:
        break;
    }
  }
}

std::vector<std::string> Dataset::column_names() const {
  std::vector<std::string> names;
  names.reserve(schema_.size());
  for (const auto& s : schema_) names.push_back(s.name);
  return names;
}

std::optional<std::size_t> Dataset::find_column(std::string_view name) const {
  auto it = name_index_.find(std::string(name));
  if (it == name_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dataset::column_index(std::string_view name) const {
  if (auto idx = find_column(name)) return *idx;
  throw UnknownColumnError(std::string(name), nearest_name(std::string(name), column_names()));
}

const ColumnSchema& Dataset::column_schema(std::string_view name) const { return schema_[column_index(name)]; }

std::vector<std::size_t> Dataset::annotation_columns(std::string_view subtype) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].role == ColumnRole::annotation && schema_[c].subtype == subtype) out.push_back(c);
  }
  return out;
}

std::vector<std::size_t> Dataset::columns_with_role(ColumnRole role) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].role == role) out.push_back(c);
  }
  return out;
}

std::vector<std::string> Dataset::annotated_subtypes() const {
  std::vector<std::string> out;
  for (const auto& s : schema_) {
    if (s.role != ColumnRole::annotation) continue;
    if (std::find(out.begin(), out.end(), *s.subtype) == out.end()) out.push_back(*s.subtype);
  }
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<ScanKey> keys;
  keys.reserve(rows.size());
  std::vector<std::shared_ptr<const std::vector<Cell>>> columns;
  for (std::size_t r : rows) {
    if (r >= row_count()) throw SchemaError("row " + std::to_string(r) + " is outside the dataset");
    keys.push_back(key(r));
  }
  for (const auto& col : columns_) {
    std::vector<Cell> values;
    values.reserve(rows.size());
    for (std::size_t r : rows) values.push_back((*col)[r]);
    columns.push_back(std::make_shared<const std::vector<Cell>>(std::move(values)));
  }
  return Dataset(level_, schema_, std::make_shared<const RowSpace>(std::move(keys)), std::move(columns));
}

Dataset Dataset::with_columns(std::vector<NewColumn> added) const {
  auto schema = schema_;
  auto columns = columns_;
  for (auto& col : added) {
    validate_column(col.schema, col.values);
    auto storage = std::make_shared<const std::vector<Cell>>(std::move(col.values));
    auto existing = std::find_if(schema.begin(), schema.end(),
                                 [&](const ColumnSchema& s) { return s.name == col.schema.name; });
    if (existing == schema.end()) {
      schema.push_back(std::move(col.schema));
      columns.push_back(std::move(storage));
      continue;
    }
    if (existing->role != ColumnRole::derived || col.schema.role != ColumnRole::derived)
      throw SchemaError("column '" + col.schema.name + "' already exists");
    const auto idx = static_cast<std::size_t>(existing - schema.begin());
    *existing = std::move(col.schema);
    columns[idx] = std::move(storage);
  }
  return Dataset(level_, std::move(schema), rows_, std::move(columns));
}

std::string Dataset::fingerprint() const {
  Sha256 h;
  h.field(to_string(level_));
  h.field(std::to_string(schema_.size()));
  for (const auto& s : schema_) {
    h.field(s.name);
    h.field(to_string(s.role));
    h.field(s.annotator.value_or(""));
    h.field(s.subtype.value_or(""));
    h.field(to_string(s.value_kind));
  }
  h.field(std::to_string(row_count()));
  for (const auto& key : keys()) {
    h.field(key.scan_id);
    h.field(key.slice_index ? std::to_string(*key.slice_index) : std::string("-"));
  }
  for (const auto& column : columns_) {
    for (const Cell& cell : *column) {
      if (is_missing(cell)) {
        h.field("M");
      } else if (const double* d = number_if(cell)) {
        h.field("N" + format_number(*d));
      } else {
        h.field("T" + std::get<std::string>(cell));
      }
    }
  }
  return h.hex();
}

}  // namespace labelvar
