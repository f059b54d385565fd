#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "labelvar/core/dataset.hpp"
#include "labelvar/core/selection.hpp"

namespace labelvar::analytics {

inline constexpr double kDefaultThreshold = 0.5;

struct MetricReport {
  std::string gt_column;
  std::string pred_column;
  double threshold = kDefaultThreshold;
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  // Rows with gt = 1 among the evaluated rows.
  std::size_t support_positive = 0;
  // Rows where both cells are present.
  std::size_t n_evaluated = 0;
  // Rows in scope skipped because a cell was missing.
  std::size_t n_excluded = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

struct AnnotatorReport {
  std::string annotator;
  MetricReport report;
};

// num / den, or 0 when den is 0.
double ratio_or_zero(double num, double den);

// Fills the ratios from the four counts. Every 0/0 ratio is 0.
MetricReport report_from_counts(std::string gt_column, std::string pred_column, double threshold, std::size_t tp,
                                std::size_t tn, std::size_t fp, std::size_t fn, std::size_t excluded = 0);

// 1 where score >= threshold, 0 below, missing stays missing.
std::vector<Cell> binarize(std::span<const Cell> scores, double threshold);

// Confusion metrics of pred (binary, or scores binarized at threshold) against
// a binary ground-truth column. Throws UnknownColumnError, or SchemaError when
// gt is not binary-valued, pred is not a score, or threshold is outside [0,1].
MetricReport metrics(const Dataset& dataset, std::string_view gt_column, std::string_view pred_column,
                     double threshold = kDefaultThreshold);

MetricReport subset_metrics(const Dataset& dataset, const SelectionSet& selection, std::string_view gt_column,
                            std::string_view pred_column, double threshold = kDefaultThreshold);

// One report per annotation column of the subtype, in schema order.
std::vector<AnnotatorReport> per_annotator_metrics(const Dataset& dataset, std::string_view subtype,
                                                   std::string_view pred_column, double threshold = kDefaultThreshold);

// Prediction column as binary decisions: binary columns pass through, score
// columns are binarized. Shared by every operation that needs model decisions.
std::vector<Cell> model_decisions(const Dataset& dataset, std::string_view pred_column, double threshold);

// Throws SchemaError if a non-missing value is not 0 or 1.
void require_binary(const Dataset& dataset, std::string_view column);

}  // namespace labelvar::analytics
