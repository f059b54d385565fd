#include "labelvar/report/config.hpp"

#include <fstream>

#include "labelvar/core/errors.hpp"

namespace labelvar::report {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <class T>
void read_into(const json& doc, const char* key, T& out, const std::string& where) {
  if (!doc.contains(key) || doc.at(key).is_null()) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(where + "." + key + ": " + e.what());
  }
}

const json& section(const json& doc, const char* key) {
  static const json empty = json::object();
  if (!doc.contains(key)) return empty;
  const json& s = doc.at(key);
  if (!s.is_object()) throw SchemaError(std::string("report config: '") + key + "' must be an object");
  return s;
}

}  // namespace

std::string expand(std::string_view text, std::string_view subtype) {
  static constexpr std::string_view kToken = "{subtype}";
  std::string out;
  std::size_t from = 0;
  for (std::size_t at; (at = text.find(kToken, from)) != std::string_view::npos; from = at + kToken.size()) {
    out.append(text.substr(from, at - from));
    out.append(subtype);
  }
  out.append(text.substr(from));
  return out;
}

ReportConfig report_config_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("report config must be a JSON object");
  ReportConfig c;
  read_into(doc, "threshold", c.threshold, "config");
  if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) throw SchemaError("config.threshold must lie in [0, 1]");
  if (doc.contains("tie_policy")) {
    try {
      c.tie_policy = ingest::parse_tie_policy(doc.at("tie_policy").get<std::string>());
    } catch (const json::exception& e) {
      throw SchemaError(std::string("config.tie_policy: ") + e.what());
    }
  }

  const json& one = section(doc, "cycle_I");
  read_into(one, "subtype", c.cycle_I.subtype, "cycle_I");
  read_into(one, "pred_column", c.cycle_I.pred_column, "cycle_I");
  if (one.contains("scatter")) {
    ScatterConfig s;
    const json& sj = section(one, "scatter");
    read_into(sj, "query", s.query, "cycle_I.scatter");
    read_into(sj, "columns", s.columns, "cycle_I.scatter");
    c.cycle_I.scatter = std::move(s);
  }

  const json& two = section(doc, "cycle_II");
  read_into(two, "subtype", c.cycle_II.subtype, "cycle_II");
  read_into(two, "x_column", c.cycle_II.x_column, "cycle_II");
  read_into(two, "y_column", c.cycle_II.y_column, "cycle_II");

  const json& three = section(doc, "cycle_III");
  read_into(three, "subtypes", c.cycle_III.subtypes, "cycle_III");
  read_into(three, "gt_column", c.cycle_III.gt_column, "cycle_III");
  read_into(three, "pred_column", c.cycle_III.pred_column, "cycle_III");
  read_into(three, "unanimous_query", c.cycle_III.unanimous_query, "cycle_III");
  read_into(three, "disputed_query", c.cycle_III.disputed_query, "cycle_III");

  const json& four = section(doc, "cycle_IV");
  read_into(four, "profile_subtype", c.cycle_IV.profile_subtype, "cycle_IV");
  read_into(four, "queries", c.cycle_IV.queries, "cycle_IV");
  if (four.contains("comparisons")) {
    if (!four.at("comparisons").is_array()) throw SchemaError("cycle_IV.comparisons must be an array");
    for (const auto& item : four.at("comparisons")) {
      Comparison cmp;
      read_into(item, "gt_column", cmp.gt_column, "cycle_IV.comparisons");
      read_into(item, "pred_column", cmp.pred_column, "cycle_IV.comparisons");
      if (cmp.gt_column.empty() || cmp.pred_column.empty())
        throw SchemaError("cycle_IV.comparisons entries need gt_column and pred_column");
      c.cycle_IV.comparisons.push_back(std::move(cmp));
    }
  }
  return c;
}

ReportConfig read_report_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open report config '" + path.string() + "'");
  try {
    return report_config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw LoadError("report config '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

ordered_json to_json(const ReportConfig& c) {
  ordered_json j;
  j["threshold"] = c.threshold;
  j["tie_policy"] = std::string(ingest::to_string(c.tie_policy));
  ordered_json one{{"subtype", c.cycle_I.subtype}, {"pred_column", c.cycle_I.pred_column}};
  if (c.cycle_I.scatter) one["scatter"] = {{"query", c.cycle_I.scatter->query}, {"columns", c.cycle_I.scatter->columns}};
  j["cycle_I"] = std::move(one);
  j["cycle_II"] = {{"subtype", c.cycle_II.subtype}, {"x_column", c.cycle_II.x_column}, {"y_column", c.cycle_II.y_column}};
  j["cycle_III"] = {{"subtypes", c.cycle_III.subtypes},
                    {"gt_column", c.cycle_III.gt_column},
                    {"pred_column", c.cycle_III.pred_column},
                    {"unanimous_query", c.cycle_III.unanimous_query},
                    {"disputed_query", c.cycle_III.disputed_query}};
  ordered_json comparisons = ordered_json::array();
  for (const auto& cmp : c.cycle_IV.comparisons)
    comparisons.push_back({{"gt_column", cmp.gt_column}, {"pred_column", cmp.pred_column}});
  j["cycle_IV"] = {{"profile_subtype", c.cycle_IV.profile_subtype},
                   {"comparisons", std::move(comparisons)},
                   {"queries", c.cycle_IV.queries}};
  return j;
}

ReportConfig resolve(ReportConfig c, const Dataset& dataset) {
  const auto subtypes = dataset.annotated_subtypes();
  const std::string first = subtypes.empty() ? std::string() : subtypes.front();
  if (c.cycle_I.subtype.empty()) c.cycle_I.subtype = first;
  if (c.cycle_II.subtype.empty()) c.cycle_II.subtype = first;
  if (c.cycle_III.subtypes.empty()) c.cycle_III.subtypes = subtypes;
  if (c.cycle_IV.profile_subtype.empty()) c.cycle_IV.profile_subtype = first;
  return c;
}

}  // namespace labelvar::report
