#include "labelvar/report/report.hpp"

#include <chrono>
#include <ctime>
#include <exception>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "labelvar/analytics/agreement.hpp"
#include "labelvar/analytics/correlation.hpp"
#include "labelvar/analytics/metrics.hpp"
#include "labelvar/analytics/serialize.hpp"
#include "labelvar/analytics/series.hpp"
#include "labelvar/ingest/derive.hpp"
#include "labelvar/query/evaluator.hpp"

namespace labelvar::report {

SectionError::SectionError(std::string section, const std::string& message)
    : Error(section + ": " + message), section_(std::move(section)) {}

namespace {

const char* const kNoSubtype = "dataset has no annotation columns";

template <class F>
Json run_section(const char* name, F&& body) {
  try {
    Json section;
    section["name"] = name;
    body(section);
    return section;
  } catch (const Error& e) {
    std::throw_with_nested(SectionError(name, e.what()));
  }
}

Json selection_json(const std::string& text, const SelectionSet& selection) {
  return {{"query", text}, {"count", selection.size()}};
}

void cycle_I(Json& out, const Dataset& d, const ReportConfig& c) {
  const std::string& s = c.cycle_I.subtype;
  out["subtype"] = s;
  if (s.empty()) {
    out["note"] = kNoSubtype;
    return;
  }
  const std::string pred = expand(c.cycle_I.pred_column, s);
  out["pred_column"] = pred;
  out["threshold"] = c.threshold;
  Json annotators = Json::array();
  for (const auto& a : analytics::per_annotator_metrics(d, s, pred, c.threshold))
    annotators.push_back({{"annotator", a.annotator}, {"metrics", analytics::to_json(a.report)}});
  out["annotators"] = std::move(annotators);

  if (!c.cycle_I.scatter) return;
  const std::string text = expand(c.cycle_I.scatter->query, s);
  const auto selection = query::select(text, d);
  std::vector<std::string> columns;
  for (const auto& col : c.cycle_I.scatter->columns) columns.push_back(expand(col, s));
  Json scatter = selection_json(text, selection);
  Json series = Json::array();
  for (const auto& line : analytics::scatter_series(d, selection, columns)) {
    std::size_t ones = 0, zeros = 0, missing = 0;
    for (const auto& p : line.points) {
      const double* v = number_if(p.value);
      if (is_missing(p.value)) ++missing;
      else if (v && *v == 1.0) ++ones;
      else if (v && *v == 0.0) ++zeros;
    }
    series.push_back({{"column", line.column}, {"points", line.points.size()}, {"ones", ones}, {"zeros", zeros},
                      {"missing", missing}});
  }
  scatter["series"] = std::move(series);
  out["scatter"] = std::move(scatter);
}

void cycle_II(Json& out, const Dataset& d, const ReportConfig& c) {
  const std::string& s = c.cycle_II.subtype;
  out["subtype"] = s;
  if (s.empty()) {
    out["pearson"] = nullptr;
    out["note"] = kNoSubtype;
    return;
  }
  const std::string x = expand(c.cycle_II.x_column, s);
  const std::string y = expand(c.cycle_II.y_column, s);
  out["x_column"] = x;
  out["y_column"] = y;
  try {
    const auto r = analytics::pearson(d, x, y);
    out["pearson"] = r.r;
    out["pairs"] = r.pairs;
  } catch (const DegenerateInputError& e) {
    std::size_t pairs = 0;
    const auto xs = d.values(x);
    const auto ys = d.values(y);
    for (std::size_t i = 0; i < d.row_count(); ++i) pairs += !is_missing(xs[i]) && !is_missing(ys[i]);
    out["pearson"] = nullptr;
    out["pairs"] = pairs;
    out["note"] = e.what();
  }
}

void cycle_III(Json& out, const Dataset& d, const ReportConfig& c) {
  out["threshold"] = c.threshold;
  Json subtypes = Json::array();
  for (const auto& s : c.cycle_III.subtypes) {
    const std::string gt = expand(c.cycle_III.gt_column, s);
    const std::string pred = expand(c.cycle_III.pred_column, s);
    Json entry{{"subtype", s}, {"gt_column", gt}, {"pred_column", pred}};
    entry["overlap_table"] = analytics::to_json(analytics::overlap_table(d, s, pred, c.threshold));

    const std::string u_text = expand(c.cycle_III.unanimous_query, s);
    const std::string d_text = expand(c.cycle_III.disputed_query, s);
    const auto unanimous = query::select(u_text, d);
    const auto disputed = query::select(d_text, d);
    const auto mu = analytics::subset_metrics(d, unanimous, gt, pred, c.threshold);
    const auto md = analytics::subset_metrics(d, disputed, gt, pred, c.threshold);
    Json u = selection_json(u_text, unanimous);
    u["metrics"] = analytics::to_json(mu);
    Json v = selection_json(d_text, disputed);
    v["metrics"] = analytics::to_json(md);
    entry["unanimous"] = std::move(u);
    entry["disputed"] = std::move(v);
    entry["unanimous_outperforms"] = mu.accuracy > md.accuracy && mu.f1 > md.f1;
    subtypes.push_back(std::move(entry));
  }
  out["subtypes"] = std::move(subtypes);
}

void cycle_IV(Json& out, const Dataset& d, const ReportConfig& c) {
  out["threshold"] = c.threshold;
  Json comparisons = Json::array();
  for (const auto& cmp : c.cycle_IV.comparisons)
    comparisons.push_back(analytics::to_json(analytics::metrics(d, cmp.gt_column, cmp.pred_column, c.threshold)));
  out["comparisons"] = std::move(comparisons);

  const std::string& s = c.cycle_IV.profile_subtype;
  if (s.empty()) {
    out["minority_profile"] = nullptr;
    out["note"] = kNoSubtype;
  } else {
    out["minority_profile"] = {{"subtype", s}, {"counts", analytics::to_json(analytics::minority_label_profile(d, s))}};
  }

  Json queries = Json::array();
  for (const auto& text : c.cycle_IV.queries) {
    const auto selection = query::select(text, d);
    Json q = selection_json(text, selection);
    q["keys"] = analytics::keys_to_json(selection);
    queries.push_back(std::move(q));
  }
  out["queries"] = std::move(queries);
}

}  // namespace

Json build_report(const Dataset& dataset, const ReportConfig& config, std::string_view source,
                  std::string_view generated_at) {
  const ReportConfig c = resolve(config, dataset);
  const Dataset d = ingest::derive_all(dataset, c.tie_policy);

  Json report;
  report["format"] = "labelvar-report/1";
  report["generated_at"] = generated_at;
  report["fingerprint"] = dataset.fingerprint();
  report["dataset"] = {{"source", source},
                       {"level", std::string(to_string(dataset.level()))},
                       {"rows", dataset.row_count()},
                       {"columns", dataset.column_count()},
                       {"subtypes", dataset.annotated_subtypes()}};
  report["config"] = to_json(c);
  Json sections = Json::array();
  sections.push_back(run_section("cycle_I", [&](Json& s) { cycle_I(s, d, c); }));
  sections.push_back(run_section("cycle_II", [&](Json& s) { cycle_II(s, d, c); }));
  sections.push_back(run_section("cycle_III", [&](Json& s) { cycle_III(s, d, c); }));
  sections.push_back(run_section("cycle_IV", [&](Json& s) { cycle_IV(s, d, c); }));
  report["sections"] = std::move(sections);
  return report;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

}  // namespace labelvar::report
