#pragma once

#include <cstddef>
#include <map>
#include <string_view>
#include <vector>

#include "labelvar/core/dataset.hpp"
#include "labelvar/core/selection.hpp"
#include "labelvar/analytics/metrics.hpp"

namespace labelvar::analytics {

struct OverlapRow {
  int k = 0;
  std::size_t cases = 0;
  std::size_t model_true = 0;
  std::size_t model_false = 0;
  // model_true / cases, 0 for an empty bucket.
  double overlap = 0.0;

  friend bool operator==(const OverlapRow&, const OverlapRow&) = default;
};

// Rows bucketed by how many annotators labelled the subtype positive, for
// k = K..1 where K is the number of annotation columns. Rows with no positive
// annotator are not potential cases and are left out. A missing prediction
// counts as model_false. Empty buckets are kept with cases = 0.
std::vector<OverlapRow> overlap_table(const Dataset& dataset, std::string_view subtype, std::string_view pred_column,
                                      double threshold = kDefaultThreshold);

struct ConcordancePartition {
  // Every labelling annotator agrees (all negative or all positive).
  SelectionSet unanimous;
  // Unanimous negatives plus rows where some but not all labelling annotators
  // are positive.
  SelectionSet disputed_plus_negative;
};

// Uses each row's own denominator (annotators with a non-missing label). Rows
// where nobody labelled the subtype belong to neither subset.
ConcordancePartition concordance_partition(const Dataset& dataset, std::string_view subtype);

// agreement count k -> rows with exactly k >= 1 positive annotators.
std::map<int, std::size_t> minority_label_profile(const Dataset& dataset, std::string_view subtype);

struct AgreementCounts {
  std::vector<int> positive;
  std::vector<int> labelled;
  int panel_size = 0;
};

// Per-row positive and non-missing label counts for a subtype.
AgreementCounts agreement_counts(const Dataset& dataset, std::string_view subtype);

}  // namespace labelvar::analytics
