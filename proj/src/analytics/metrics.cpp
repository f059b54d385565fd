#include "labelvar/analytics/metrics.hpp"

#include "labelvar/core/errors.hpp"

namespace labelvar::analytics {

namespace {

void check_threshold(double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw SchemaError("threshold " + std::to_string(threshold) + " is outside [0, 1]");
}

MetricReport count_rows(const Dataset& dataset, std::span<const std::size_t> rows, std::string_view gt_column,
                        std::string_view pred_column, double threshold) {
  check_threshold(threshold);
  require_binary(dataset, gt_column);
  const auto gt = dataset.values(gt_column);
  const auto pred = model_decisions(dataset, pred_column, threshold);

  std::size_t tp = 0, tn = 0, fp = 0, fn = 0, excluded = 0;
  for (std::size_t r : rows) {
    const double* g = number_if(gt[r]);
    const double* p = number_if(pred[r]);
    if (!g || !p) {
      ++excluded;
      continue;
    }
    const bool truth = *g == 1.0;
    const bool predicted = *p == 1.0;
    if (truth && predicted) ++tp;
    else if (truth) ++fn;
    else if (predicted) ++fp;
    else ++tn;
  }
  return report_from_counts(std::string(gt_column), std::string(pred_column), threshold, tp, tn, fp, fn, excluded);
}

}  // namespace

double ratio_or_zero(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

MetricReport report_from_counts(std::string gt_column, std::string pred_column, double threshold, std::size_t tp,
                                std::size_t tn, std::size_t fp, std::size_t fn, std::size_t excluded) {
  MetricReport r;
  r.gt_column = std::move(gt_column);
  r.pred_column = std::move(pred_column);
  r.threshold = threshold;
  r.tp = tp;
  r.tn = tn;
  r.fp = fp;
  r.fn = fn;
  r.support_positive = tp + fn;
  r.n_evaluated = tp + tn + fp + fn;
  r.n_excluded = excluded;
  r.accuracy = ratio_or_zero(static_cast<double>(tp + tn), static_cast<double>(r.n_evaluated));
  r.precision = ratio_or_zero(static_cast<double>(tp), static_cast<double>(tp + fp));
  r.recall = ratio_or_zero(static_cast<double>(tp), static_cast<double>(tp + fn));
  r.f1 = ratio_or_zero(2.0 * r.precision * r.recall, r.precision + r.recall);
  return r;
}

std::vector<Cell> binarize(std::span<const Cell> scores, double threshold) {
  check_threshold(threshold);
  std::vector<Cell> out;
  out.reserve(scores.size());
  for (const Cell& c : scores) {
    if (const double* v = number_if(c)) {
      out.emplace_back(*v >= threshold ? 1.0 : 0.0);
    } else {
      out.emplace_back(Missing{});
    }
  }
  return out;
}

void require_binary(const Dataset& dataset, std::string_view column) {
  const auto values = dataset.values(column);
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (is_missing(values[r])) continue;
    const double* v = number_if(values[r]);
    if (!v || (*v != 0.0 && *v != 1.0))
      throw SchemaError("column '" + std::string(column) + "' is not binary (row " + std::to_string(r) + " holds '" +
                        cell_to_string(values[r]) + "')");
  }
}

std::vector<Cell> model_decisions(const Dataset& dataset, std::string_view pred_column, double threshold) {
  const ColumnSchema& schema = dataset.column_schema(pred_column);
  const auto values = dataset.values(pred_column);
  if (schema.value_kind == ValueKind::binary) return {values.begin(), values.end()};
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (is_missing(values[r])) continue;
    const double* v = number_if(values[r]);
    if (!v || *v < 0.0 || *v > 1.0)
      throw SchemaError("prediction column '" + std::string(pred_column) + "' holds '" + cell_to_string(values[r]) +
                        "' at row " + std::to_string(r) + ", expected a score in [0, 1]");
  }
  return binarize(values, threshold);
}

MetricReport metrics(const Dataset& dataset, std::string_view gt_column, std::string_view pred_column,
                     double threshold) {
  std::vector<std::size_t> rows(dataset.row_count());
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
  return count_rows(dataset, rows, gt_column, pred_column, threshold);
}

MetricReport subset_metrics(const Dataset& dataset, const SelectionSet& selection, std::string_view gt_column,
                            std::string_view pred_column, double threshold) {
  if (!selection.belongs_to(dataset)) throw SelectionMismatchError("selection was not produced from this dataset");
  return count_rows(dataset, selection.rows(), gt_column, pred_column, threshold);
}

std::vector<AnnotatorReport> per_annotator_metrics(const Dataset& dataset, std::string_view subtype,
                                                   std::string_view pred_column, double threshold) {
  const auto columns = dataset.annotation_columns(subtype);
  if (columns.empty()) throw SchemaError("no annotation columns for subtype '" + std::string(subtype) + "'");
  std::vector<AnnotatorReport> out;
  out.reserve(columns.size());
  for (std::size_t c : columns) {
    const ColumnSchema& schema = dataset.schema()[c];
    out.push_back({*schema.annotator, metrics(dataset, schema.name, pred_column, threshold)});
  }
  return out;
}

}  // namespace labelvar::analytics
