#include "labelvar/analytics/serialize.hpp"

#include "labelvar/analytics/format.hpp"

namespace labelvar::analytics {

Json to_json(const MetricReport& r) {
  Json j;
  j["gt_column"] = r.gt_column;
  j["pred_column"] = r.pred_column;
  j["threshold"] = r.threshold;
  j["tp"] = r.tp;
  j["tn"] = r.tn;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["support_positive"] = r.support_positive;
  j["n_evaluated"] = r.n_evaluated;
  j["n_excluded"] = r.n_excluded;
  j["accuracy"] = r.accuracy;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["display"] = {{"accuracy", format_percent(r.accuracy)},
                  {"precision", format_percent(r.precision)},
                  {"recall", format_percent(r.recall)},
                  {"f1", format_percent(r.f1)}};
  return j;
}

Json to_json(const OverlapRow& row) {
  Json j;
  j["k"] = row.k;
  j["cases"] = row.cases;
  j["model_true"] = row.model_true;
  j["model_false"] = row.model_false;
  j["overlap"] = row.overlap;
  j["overlap_display"] = format_percent(row.overlap);
  return j;
}

Json to_json(const std::vector<OverlapRow>& rows) {
  Json j = Json::array();
  for (const auto& row : rows) j.push_back(to_json(row));
  return j;
}

Json to_json(const std::map<int, std::size_t>& profile) {
  Json j = Json::object();
  for (auto it = profile.rbegin(); it != profile.rend(); ++it) j[std::to_string(it->first)] = it->second;
  return j;
}

Json cell_to_json(const Cell& cell) {
  if (const double* v = number_if(cell)) return *v;
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  return nullptr;
}

Json to_json(const std::vector<Series>& series) {
  Json j = Json::array();
  for (const auto& s : series) {
    Json points = Json::array();
    for (const auto& p : s.points) points.push_back(Json::array({p.row, cell_to_json(p.value)}));
    j.push_back({{"column", s.column}, {"points", std::move(points)}});
  }
  return j;
}

Json keys_to_json(const SelectionSet& selection) {
  Json j = Json::array();
  for (const auto& key : selection.keys()) j.push_back(to_string(key));
  return j;
}

}  // namespace labelvar::analytics
