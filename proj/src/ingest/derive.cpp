#include "labelvar/ingest/derive.hpp"

#include <algorithm>

#include "labelvar/core/errors.hpp"

namespace labelvar::ingest {

namespace {

std::vector<std::size_t> require_annotations(const Dataset& dataset, std::string_view subtype) {
  auto cols = dataset.annotation_columns(subtype);
  if (cols.empty()) throw SchemaError("no annotation columns for subtype '" + std::string(subtype) + "'");
  return cols;
}

struct Votes {
  int positive = 0;
  int labelled = 0;
};

Votes count_votes(const Dataset& dataset, std::span<const std::size_t> columns, std::size_t row) {
  Votes v;
  for (std::size_t c : columns) {
    const double* label = number_if(dataset.values(c)[row]);
    if (!label) continue;
    ++v.labelled;
    if (*label == 1.0) ++v.positive;
  }
  return v;
}

Dataset consensus_over(const Dataset& dataset, std::string_view subtype, TiePolicy tie_policy,
                       std::span<const std::size_t> columns, std::string column_name) {
  std::vector<Cell> out;
  out.reserve(dataset.row_count());
  for (std::size_t r = 0; r < dataset.row_count(); ++r) {
    const Votes v = count_votes(dataset, columns, r);
    const int negative = v.labelled - v.positive;
    if (v.labelled == 0) {
      out.emplace_back(Missing{});
    } else if (v.positive > negative) {
      out.emplace_back(1.0);
    } else if (negative > v.positive) {
      out.emplace_back(0.0);
    } else if (tie_policy == TiePolicy::positive) {
      out.emplace_back(1.0);
    } else if (tie_policy == TiePolicy::negative) {
      out.emplace_back(0.0);
    } else {
      out.emplace_back(Missing{});
    }
  }
  ColumnSchema schema{std::move(column_name), ColumnRole::derived, std::nullopt, std::string(subtype), ValueKind::binary};
  return dataset.with_columns({NewColumn{std::move(schema), std::move(out)}});
}

}  // namespace

std::string_view to_string(TiePolicy policy) {
  switch (policy) {
    case TiePolicy::positive: return "positive";
    case TiePolicy::negative: return "negative";
    case TiePolicy::missing: return "missing";
  }
  return "positive";
}

TiePolicy parse_tie_policy(std::string_view text) {
  if (text == "positive") return TiePolicy::positive;
  if (text == "negative") return TiePolicy::negative;
  if (text == "missing") return TiePolicy::missing;
  throw SchemaError("unknown tie policy '" + std::string(text) + "' (expected positive, negative or missing)");
}

std::string agree_count_column(std::string_view subtype) { return "agree_count_" + std::string(subtype); }
std::string agree_prop_column(std::string_view subtype) { return "agree_prop_" + std::string(subtype); }
std::string consensus_column(std::string_view subtype) { return "consensus_" + std::string(subtype); }

Dataset derive_agreement(const Dataset& dataset, std::string_view subtype) {
  const auto columns = require_annotations(dataset, subtype);
  std::vector<Cell> counts;
  std::vector<Cell> props;
  counts.reserve(dataset.row_count());
  props.reserve(dataset.row_count());
  for (std::size_t r = 0; r < dataset.row_count(); ++r) {
    const Votes v = count_votes(dataset, columns, r);
    counts.emplace_back(static_cast<double>(v.positive));
    if (v.labelled == 0) {
      props.emplace_back(Missing{});
    } else {
      props.emplace_back(static_cast<double>(v.positive) / v.labelled);
    }
  }
  const std::string st(subtype);
  return dataset.with_columns({
      NewColumn{ColumnSchema{agree_count_column(st), ColumnRole::derived, std::nullopt, st, ValueKind::numeric},
                std::move(counts)},
      NewColumn{ColumnSchema{agree_prop_column(st), ColumnRole::derived, std::nullopt, st, ValueKind::score},
                std::move(props)},
  });
}

Dataset derive_consensus(const Dataset& dataset, std::string_view subtype, TiePolicy tie_policy) {
  const auto columns = require_annotations(dataset, subtype);
  return consensus_over(dataset, subtype, tie_policy, columns, consensus_column(subtype));
}

Dataset derive_consensus(const Dataset& dataset, std::string_view subtype, TiePolicy tie_policy,
                         std::span<const std::string> annotators, std::string column_name) {
  const auto all = require_annotations(dataset, subtype);
  std::vector<std::size_t> columns;
  for (const auto& annotator : annotators) {
    auto it = std::find_if(all.begin(), all.end(),
                           [&](std::size_t c) { return dataset.schema()[c].annotator == annotator; });
    if (it == all.end())
      throw SchemaError("annotator '" + annotator + "' has no column for subtype '" + std::string(subtype) + "'");
    columns.push_back(*it);
  }
  if (columns.empty()) throw SchemaError("consensus needs at least one annotator");
  return consensus_over(dataset, subtype, tie_policy, columns, std::move(column_name));
}

Dataset derive_all(const Dataset& dataset, TiePolicy tie_policy) {
  Dataset out = dataset;
  for (const auto& subtype : dataset.annotated_subtypes()) {
    out = derive_agreement(out, subtype);
    const auto existing = out.find_column(consensus_column(subtype));
    if (!existing || out.schema()[*existing].role == ColumnRole::derived) out = derive_consensus(out, subtype, tie_policy);
  }
  return out;
}

}  // namespace labelvar::ingest
