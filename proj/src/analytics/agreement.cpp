#include "labelvar/analytics/agreement.hpp"

#include "labelvar/core/errors.hpp"

namespace labelvar::analytics {

AgreementCounts agreement_counts(const Dataset& dataset, std::string_view subtype) {
  const auto columns = dataset.annotation_columns(subtype);
  if (columns.empty()) throw SchemaError("no annotation columns for subtype '" + std::string(subtype) + "'");
  AgreementCounts out;
  out.panel_size = static_cast<int>(columns.size());
  out.positive.assign(dataset.row_count(), 0);
  out.labelled.assign(dataset.row_count(), 0);
  for (std::size_t c : columns) {
    const auto values = dataset.values(c);
    for (std::size_t r = 0; r < values.size(); ++r) {
      const double* v = number_if(values[r]);
      if (!v) continue;
      ++out.labelled[r];
      if (*v == 1.0) ++out.positive[r];
    }
  }
  return out;
}

std::vector<OverlapRow> overlap_table(const Dataset& dataset, std::string_view subtype, std::string_view pred_column,
                                      double threshold) {
  const AgreementCounts counts = agreement_counts(dataset, subtype);
  const auto decisions = model_decisions(dataset, pred_column, threshold);

  std::vector<OverlapRow> rows;
  for (int k = counts.panel_size; k >= 1; --k) rows.push_back(OverlapRow{k, 0, 0, 0, 0.0});
  for (std::size_t r = 0; r < dataset.row_count(); ++r) {
    const int k = counts.positive[r];
    if (k == 0) continue;
    OverlapRow& bucket = rows[static_cast<std::size_t>(counts.panel_size - k)];
    ++bucket.cases;
    const double* d = number_if(decisions[r]);
    if (d && *d == 1.0) ++bucket.model_true;
    else ++bucket.model_false;
  }
  for (auto& bucket : rows) {
    bucket.overlap = ratio_or_zero(static_cast<double>(bucket.model_true), static_cast<double>(bucket.cases));
  }
  return rows;
}

ConcordancePartition concordance_partition(const Dataset& dataset, std::string_view subtype) {
  const AgreementCounts counts = agreement_counts(dataset, subtype);
  std::vector<std::size_t> unanimous;
  std::vector<std::size_t> disputed;
  for (std::size_t r = 0; r < dataset.row_count(); ++r) {
    const int k = counts.positive[r];
    const int denominator = counts.labelled[r];
    if (denominator == 0) continue;
    if (k == 0) {
      unanimous.push_back(r);
      disputed.push_back(r);
    } else if (k == denominator) {
      unanimous.push_back(r);
    } else {
      disputed.push_back(r);
    }
  }
  const std::string st(subtype);
  return ConcordancePartition{
      SelectionSet(dataset.row_space(), std::move(unanimous), "unanimous(" + st + ")"),
      SelectionSet(dataset.row_space(), std::move(disputed), "disputed_plus_negative(" + st + ")"),
  };
}

std::map<int, std::size_t> minority_label_profile(const Dataset& dataset, std::string_view subtype) {
  const AgreementCounts counts = agreement_counts(dataset, subtype);
  std::map<int, std::size_t> profile;
  for (int k : counts.positive) {
    if (k >= 1) ++profile[k];
  }
  return profile;
}

}  // namespace labelvar::analytics
