#include <fmt/format.h>

#include "labelvar/report/report.hpp"

namespace labelvar::report {

namespace {

std::string str(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return "-";
  const Json& v = j.at(key);
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string metric_cells(const Json& m) {
  const Json& shown = m.at("display");
  return fmt::format("{:>7} {:>7} {:>9} {:>7} {:>7} {:>9}", m.at("support_positive").get<std::size_t>(),
                     shown.at("accuracy").get<std::string>(), shown.at("precision").get<std::string>(),
                     shown.at("recall").get<std::string>(), shown.at("f1").get<std::string>(),
                     m.at("n_evaluated").get<std::size_t>());
}

const char* const kMetricHeader = "support accuracy precision  recall      f1 evaluated";

void render_cycle_I(std::string& out, const Json& s) {
  if (s.contains("note")) {
    out += fmt::format("  {}\n", str(s, "note"));
    return;
  }
  out += fmt::format("  per-annotator metrics for {} against {} (threshold {})\n", str(s, "subtype"),
                     str(s, "pred_column"), str(s, "threshold"));
  out += fmt::format("  {:<12} {}\n", "annotator", kMetricHeader);
  for (const auto& a : s.at("annotators"))
    out += fmt::format("  {:<12} {}\n", a.at("annotator").get<std::string>(), metric_cells(a.at("metrics")));
  if (s.contains("scatter")) {
    const Json& sc = s.at("scatter");
    out += fmt::format("  scatter selection \"{}\": {} rows\n", str(sc, "query"), str(sc, "count"));
    for (const auto& line : sc.at("series"))
      out += fmt::format("    {:<20} ones {:>4}  zeros {:>4}  missing {:>4}\n", str(line, "column"), str(line, "ones"),
                         str(line, "zeros"), str(line, "missing"));
  }
}

void render_cycle_II(std::string& out, const Json& s) {
  if (!s.contains("x_column")) {
    out += fmt::format("  {}\n", str(s, "note"));
    return;
  }
  const Json& r = s.at("pearson");
  out += fmt::format("  pearson({}, {}) = {} over {} pairs\n", str(s, "x_column"), str(s, "y_column"),
                     r.is_null() ? std::string("undefined") : fmt::format("{:.4f}", r.get<double>()), str(s, "pairs"));
  if (s.contains("note")) out += fmt::format("  note: {}\n", str(s, "note"));
}

void render_cycle_III(std::string& out, const Json& s) {
  for (const auto& e : s.at("subtypes")) {
    out += fmt::format("  -- {} (gt {}, pred {})\n", str(e, "subtype"), str(e, "gt_column"), str(e, "pred_column"));
    out += fmt::format("     {:>2} {:>6} {:>10} {:>11} {:>8}\n", "k", "cases", "model_true", "model_false", "overlap");
    for (const auto& row : e.at("overlap_table")) {
      out += fmt::format("     {:>2} {:>6} {:>10} {:>11} {:>8}\n", str(row, "k"), str(row, "cases"),
                         str(row, "model_true"), str(row, "model_false"), str(row, "overlap_display"));
    }
    out += fmt::format("     {:<10} {:>5} {}\n", "subset", "rows", kMetricHeader);
    for (const char* part : {"unanimous", "disputed"}) {
      const Json& p = e.at(part);
      out += fmt::format("     {:<10} {:>5} {}\n", part, str(p, "count"), metric_cells(p.at("metrics")));
    }
    out += fmt::format("     unanimous outperforms disputed: {}\n", str(e, "unanimous_outperforms"));
  }
}

void render_cycle_IV(std::string& out, const Json& s) {
  for (const auto& m : s.at("comparisons")) {
    out += fmt::format("  gt {} vs {}: tp {} fn {} fp {} tn {}  recall {}\n", str(m, "gt_column"), str(m, "pred_column"),
                       str(m, "tp"), str(m, "fn"), str(m, "fp"), str(m, "tn"), str(m.at("display"), "recall"));
  }
  const Json& profile = s.at("minority_profile");
  if (!profile.is_null()) {
    std::string counts;
    for (const auto& [k, n] : profile.at("counts").items()) counts += fmt::format(" {}:{}", k, n.dump());
    out += fmt::format("  minority profile ({}):{}\n", str(profile, "subtype"), counts.empty() ? " none" : counts);
  }
  for (const auto& q : s.at("queries")) out += fmt::format("  \"{}\": {} rows\n", str(q, "query"), str(q, "count"));
}

}  // namespace

std::string render_text(const Json& report) {
  std::string out;
  const Json& ds = report.at("dataset");
  out += fmt::format("labelvar report for {} ({} rows, {} level)\n", str(ds, "source"), str(ds, "rows"), str(ds, "level"));
  out += fmt::format("fingerprint {}\ngenerated {}\n", str(report, "fingerprint"), str(report, "generated_at"));
  for (const auto& s : report.at("sections")) {
    const std::string name = s.at("name").get<std::string>();
    out += fmt::format("\n== {}\n", name);
    if (name == "cycle_I") render_cycle_I(out, s);
    else if (name == "cycle_II") render_cycle_II(out, s);
    else if (name == "cycle_III") render_cycle_III(out, s);
    else if (name == "cycle_IV") render_cycle_IV(out, s);
  }
  return out;
}

}  // namespace labelvar::report
