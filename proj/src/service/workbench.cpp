#include "labelvar/service/workbench.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "labelvar/analytics/agreement.hpp"
#include "labelvar/analytics/correlation.hpp"
#include "labelvar/analytics/metrics.hpp"
#include "labelvar/analytics/serialize.hpp"
#include "labelvar/analytics/series.hpp"
#include "labelvar/core/errors.hpp"
#include "labelvar/ingest/aggregate.hpp"
#include "labelvar/ingest/loader.hpp"
#include "labelvar/ingest/manifest.hpp"
#include "labelvar/query/evaluator.hpp"
#include "labelvar/query/parser.hpp"

namespace labelvar::service {

ApiError::ApiError(int status, std::string code, const std::string& message, Json detail)
    : std::runtime_error(message), status_(status), code_(std::move(code)), detail_(std::move(detail)) {}

Json ApiError::body() const { return {{"code", code_}, {"message", what()}, {"detail", detail_}}; }

namespace {

constexpr const char* kStateFormat = "labelvar-session/1";

template <class F>
auto guarded(F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const ApiError&) {
    throw;
  } catch (const UnknownColumnError& e) {
    throw ApiError(400, "unknown_column", e.what(), {{"column", e.name()}, {"nearest", e.nearest()}});
  } catch (const SyntaxError& e) {
    throw ApiError(400, "syntax_error", e.what(),
                   {{"offset", e.offset()}, {"expected", e.expected()}, {"found", e.found()}});
  } catch (const LoadError& e) {
    Json detail = Json::object();
    if (e.line()) detail["line"] = *e.line();
    if (!e.column().empty()) detail["column"] = e.column();
    if (!e.value().empty()) detail["value"] = e.value();
    throw ApiError(400, "load_error", e.what(), std::move(detail));
  } catch (const DegenerateInputError& e) {
    throw ApiError(400, "degenerate_input", e.what());
  } catch (const SelectionMismatchError& e) {
    throw ApiError(409, "selection_mismatch", e.what());
  } catch (const SchemaError& e) {
    throw ApiError(400, "schema_error", e.what());
  } catch (const Error& e) {
    throw ApiError(400, "invalid_request", e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ApiError(400, "bad_request", e.what());
  }
}

std::string param(const Params& params, const std::string& key, const std::string& fallback = {}) {
  auto it = params.find(key);
  return it == params.end() || it->second.empty() ? fallback : it->second;
}

std::string required_param(const Params& params, const std::string& key) {
  std::string v = param(params, key);
  if (v.empty()) throw ApiError(400, "missing_parameter", "query parameter '" + key + "' is required", {{"parameter", key}});
  return v;
}

std::size_t size_param(const Params& params, const std::string& key, std::size_t fallback) {
  const std::string v = param(params, key);
  if (v.empty()) return fallback;
  const auto n = ingest::parse_number(v);
  if (!n || *n < 0 || *n != static_cast<double>(static_cast<std::size_t>(*n)))
    throw ApiError(400, "bad_parameter", "'" + key + "' must be a non-negative integer", {{"parameter", key}});
  return static_cast<std::size_t>(*n);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

const std::string& body_string(const Json& body, const char* key) {
  if (!body.is_object() || !body.contains(key) || !body.at(key).is_string())
    throw ApiError(400, "bad_request", fmt::format("request body needs a string field '{}'", key), {{"field", key}});
  return body.at(key).get_ref<const std::string&>();
}

double checked_threshold(const Json& value) {
  if (!value.is_number() || value.get<double>() < 0.0 || value.get<double>() > 1.0)
    throw ApiError(400, "bad_request", "threshold must be a number in [0, 1]", {{"field", "threshold"}});
  return value.get<double>();
}

enum class Scope { all, selection };

Scope parse_scope(const Params& params, Scope fallback) {
  const std::string s = param(params, "scope");
  if (s.empty()) return fallback;
  if (s == "all") return Scope::all;
  if (s == "selection") return Scope::selection;
  throw ApiError(400, "bad_parameter", "scope must be 'all' or 'selection'", {{"parameter", "scope"}});
}

const char* to_string(Scope s) { return s == Scope::all ? "all" : "selection"; }

// The session dataset restricted to the scope, as a standalone dataset.
Dataset scoped(const SessionState& st, Scope scope) {
  if (scope == Scope::all || st.selection.size() == st.dataset->row_count()) return *st.dataset;
  return st.dataset->subset(st.selection.rows());
}

SelectionSet scoped_selection(const SessionState& st, Scope scope) {
  return scope == Scope::all ? SelectionSet::all(*st.dataset) : st.selection;
}

std::string first_subtype(const Dataset& d) {
  const auto subtypes = d.annotated_subtypes();
  if (subtypes.empty()) throw ApiError(400, "no_subtypes", "the dataset has no annotation columns");
  return subtypes.front();
}

void require_gt_column(const Dataset& d, const std::string& column) {
  const ColumnSchema& schema = d.column_schema(column);
  if (schema.value_kind != ValueKind::binary) {
    throw ApiError(400, "not_binary",
                   fmt::format("column '{}' holds {} values; ground truth must be binary", column,
                               labelvar::to_string(schema.value_kind)),
                   {{"column", column}, {"value_kind", labelvar::to_string(schema.value_kind)}});
  }
}

SelectionSet selection_from_key_strings(const Dataset& d, const Json& keys, std::string provenance) {
  if (!keys.is_array()) throw ApiError(400, "bad_request", "'keys' must be an array of scan keys");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < d.row_count(); ++r) index.emplace(labelvar::to_string(d.key(r)), r);
  std::vector<std::size_t> rows;
  for (const auto& k : keys) {
    if (!k.is_string()) throw ApiError(400, "bad_request", "'keys' must be an array of scan keys");
    auto it = index.find(k.get<std::string>());
    if (it == index.end())
      throw ApiError(400, "unknown_key", "scan '" + k.get<std::string>() + "' is not in the dataset", {{"key", k}});
    rows.push_back(it->second);
  }
  return SelectionSet(d.row_space(), std::move(rows), std::move(provenance));
}

Json schema_json(const Dataset& d) {
  Json columns = Json::array();
  for (const auto& c : d.schema()) {
    Json col{{"name", c.name}, {"role", labelvar::to_string(c.role)}, {"value_kind", labelvar::to_string(c.value_kind)}};
    if (c.annotator) col["annotator"] = *c.annotator;
    if (c.subtype) col["subtype"] = *c.subtype;
    columns.push_back(std::move(col));
  }
  return columns;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ApiError(404, "image_missing", "image file '" + path.filename().string() + "' is not readable");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string base64(const std::string& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

const OverlayEntry& overlay_for(const SessionState& st, const std::string& scan) {
  if (!st.overlays) throw ApiError(404, "unknown_scan", "no overlay manifest is loaded for this session", {{"scan", scan}});
  auto it = st.overlays->entries.find(scan);
  if (it == st.overlays->entries.end())
    throw ApiError(404, "unknown_scan", "scan '" + scan + "' has no image", {{"scan", scan}});
  return it->second;
}

std::string new_session_id(std::uint64_t counter) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  return fmt::format("s{:04x}{:012x}", counter & 0xffff, rng() & 0xffffffffffffULL);
}

}  // namespace

std::shared_ptr<Session> Workbench::find(const std::string& id) const {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError(404, "unknown_session", "no session '" + id + "'", {{"session_id", id}});
  return it->second;
}

std::string Workbench::register_session(SessionState state) {
  std::lock_guard lock(sessions_mutex_);
  std::string id = new_session_id(++counter_);
  while (sessions_.count(id)) id = new_session_id(++counter_);
  sessions_.emplace(id, std::make_shared<Session>(id, std::move(state)));
  return id;
}

std::size_t Workbench::session_count() const {
  std::lock_guard lock(sessions_mutex_);
  return sessions_.size();
}

Json Workbench::load(const Json& body) {
  return guarded([&] {
    const std::string path = body_string(body, "manifest");
    ingest::TiePolicy tie = ingest::TiePolicy::positive;
    if (body.contains("tie_policy")) tie = ingest::parse_tie_policy(body_string(body, "tie_policy"));
    double threshold = analytics::kDefaultThreshold;
    if (body.contains("threshold")) threshold = checked_threshold(body.at("threshold"));

    const ingest::IngestManifest manifest = ingest::read_manifest(path);
    Dataset loaded = ingest::load(manifest);
    if (loaded.level() == Level::slice) loaded = ingest::aggregate_to_ct(loaded);
    auto dataset = std::make_shared<const Dataset>(ingest::derive_all(loaded, tie));

    std::shared_ptr<const OverlayManifest> overlays;
    const auto overlay_path = manifest.base_dir / "overlays.json";
    if (std::filesystem::exists(overlay_path)) {
      overlays = std::make_shared<const OverlayManifest>(
          read_overlay_manifest(overlay_path, manifest.resolved_image_root().value_or(manifest.base_dir)));
    }

    const auto subtypes = dataset->annotated_subtypes();
    SessionState state{
        .dataset = dataset,
        .fingerprint = loaded.fingerprint(),
        .manifest_path = path,
        .overlays = overlays,
        .tie_policy = tie,
        .gt_column = subtypes.empty() ? std::string() : ingest::consensus_column(subtypes.front()),
        .threshold = threshold,
        .named_queries = {},
        .selection = SelectionSet::all(*dataset),
        .revision = 0,
    };
    Json out;
    out["session_id"] = register_session(std::move(state));
    out["revision"] = 0;
    out["rows"] = dataset->row_count();
    out["fingerprint"] = loaded.fingerprint();
    out["gt_column"] = subtypes.empty() ? std::string() : ingest::consensus_column(subtypes.front());
    out["threshold"] = threshold;
    out["subtypes"] = subtypes;
    out["has_overlays"] = overlays != nullptr;
    return out;
  });
}

Json Workbench::info(const std::string& id) const {
  return guarded([&] {
    const auto st = find(id)->snapshot();
    Json out;
    out["session_id"] = id;
    out["revision"] = st->revision;
    out["fingerprint"] = st->fingerprint;
    out["rows"] = st->dataset->row_count();
    out["gt_column"] = st->gt_column;
    out["threshold"] = st->threshold;
    out["tie_policy"] = ingest::to_string(st->tie_policy);
    out["subtypes"] = st->dataset->annotated_subtypes();
    out["columns"] = schema_json(*st->dataset);
    out["named_queries"] = st->named_queries;
    out["selection"] = {{"count", st->selection.size()}, {"provenance", st->selection.provenance()}};
    return out;
  });
}

Json Workbench::set_ground_truth(const std::string& id, const Json& body) {
  return guarded([&] {
    const std::string column = body_string(body, "column");
    std::optional<double> threshold;
    if (body.contains("threshold")) threshold = checked_threshold(body.at("threshold"));
    const auto st = find(id)->mutate([&](SessionState& s) {
      require_gt_column(*s.dataset, column);
      s.gt_column = column;
      if (threshold) s.threshold = *threshold;
    });
    return Json{{"session_id", id}, {"revision", st->revision}, {"gt_column", st->gt_column}, {"threshold", st->threshold}};
  });
}

Json Workbench::query(const std::string& id, const Json& body) {
  return guarded([&] {
    if (!body.is_object()) throw ApiError(400, "bad_request", "request body must be a JSON object");
    const std::string combine = body.contains("combine") ? body_string(body, "combine") : "replace";
    if (combine != "replace" && combine != "intersect")
      throw ApiError(400, "bad_request", "combine must be 'replace' or 'intersect'", {{"field", "combine"}});
    std::optional<std::string> name;
    if (body.contains("name")) name = body_string(body, "name");

    std::string canonical;
    const auto st = find(id)->mutate([&](SessionState& s) {
      const Dataset& d = *s.dataset;
      SelectionSet next = SelectionSet::all(d);
      if (body.contains("keys")) {
        next = selection_from_key_strings(d, body.at("keys"), "keys");
        canonical.clear();
      } else {
        const std::string text = body.contains("text") ? body_string(body, "text") : std::string();
        if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
          const auto parsed = query::parse(text);
          canonical = query::print(parsed);
          next = query::evaluate(parsed, d, canonical);
        }
      }
      s.selection = combine == "intersect" ? intersect(s.selection, next) : std::move(next);
      if (name) s.named_queries[*name] = canonical;
    });
    Json out{{"session_id", id}, {"revision", st->revision}, {"count", st->selection.size()},
             {"provenance", st->selection.provenance()}};
    if (!canonical.empty()) out["canonical"] = canonical;
    return out;
  });
}

Json Workbench::metrics(const std::string& id, const Params& params) const {
  return guarded([&] {
    const auto st = find(id)->snapshot();
    const std::string pred = required_param(params, "pred");
    const Scope scope = parse_scope(params, Scope::all);
    if (st->gt_column.empty()) throw ApiError(400, "no_ground_truth", "the session has no ground-truth column");
    const auto report = scope == Scope::all
                            ? analytics::metrics(*st->dataset, st->gt_column, pred, st->threshold)
                            : analytics::subset_metrics(*st->dataset, st->selection, st->gt_column, pred, st->threshold);
    Json out = analytics::to_json(report);
    out["scope"] = to_string(scope);
    out["session_id"] = id;
    out["revision"] = st->revision;
    return out;
  });
}

Json Workbench::widget(const std::string& id, const std::string& name, const Params& params) const {
  return guarded([&] {
    const auto st = find(id)->snapshot();
    const Scope scope = parse_scope(params, Scope::selection);
    Json out{{"widget", name}, {"session_id", id}, {"revision", st->revision}, {"scope", to_string(scope)}};

    if (name == "overlap_table") {
      const std::string subtype = param(params, "subtype", first_subtype(*st->dataset));
      const std::string pred = param(params, "pred", "pred_" + subtype);
      out["subtype"] = subtype;
      out["pred_column"] = pred;
      out["threshold"] = st->threshold;
      out["rows"] = analytics::to_json(analytics::overlap_table(scoped(*st, scope), subtype, pred, st->threshold));
    } else if (name == "pearson") {
      const std::string subtype = first_subtype(*st->dataset);
      const std::string x = param(params, "x", ingest::agree_count_column(subtype));
      const std::string y = param(params, "y", "pred_" + subtype);
      const auto r = analytics::pearson(*st->dataset, scoped_selection(*st, scope), x, y);
      out["x_column"] = x;
      out["y_column"] = y;
      out["r"] = r.r;
      out["pairs"] = r.pairs;
    } else if (name == "scatter") {
      const auto columns = split_list(required_param(params, "columns"));
      const auto selection = scoped_selection(*st, scope);
      Json series = Json::array();
      for (const auto& line : analytics::scatter_series(*st->dataset, selection, columns)) {
        Json points = Json::array();
        for (const auto& p : line.points)
          points.push_back({{"key", labelvar::to_string(st->dataset->key(p.row))}, {"row", p.row},
                            {"value", analytics::cell_to_json(p.value)}});
        series.push_back({{"column", line.column}, {"points", std::move(points)}});
      }
      out["series"] = std::move(series);
    } else if (name == "minority_profile") {
      const std::string subtype = param(params, "subtype", first_subtype(*st->dataset));
      out["subtype"] = subtype;
      out["counts"] = analytics::to_json(analytics::minority_label_profile(scoped(*st, scope), subtype));
    } else if (name == "concordance_metrics") {
      if (st->gt_column.empty()) throw ApiError(400, "no_ground_truth", "the session has no ground-truth column");
      const std::string subtype = param(params, "subtype", first_subtype(*st->dataset));
      const std::string pred = param(params, "pred", "pred_" + subtype);
      const Dataset d = scoped(*st, scope);
      const auto parts = analytics::concordance_partition(d, subtype);
      out["subtype"] = subtype;
      out["gt_column"] = st->gt_column;
      out["pred_column"] = pred;
      for (const auto& [label, part] : {std::pair{"unanimous", &parts.unanimous},
                                        std::pair{"disputed", &parts.disputed_plus_negative}}) {
        const auto m = analytics::subset_metrics(d, *part, st->gt_column, pred, st->threshold);
        out[label] = {{"count", part->size()}, {"metrics", analytics::to_json(m)}};
      }
    } else if (name == "table") {
      const auto selection = scoped_selection(*st, scope);
      const std::size_t offset = size_param(params, "offset", 0);
      const std::size_t limit = std::min<std::size_t>(size_param(params, "limit", 50), 1000);
      std::vector<std::string> columns = split_list(param(params, "columns"));
      if (columns.empty()) columns = st->dataset->column_names();
      std::vector<std::size_t> idx;
      for (const auto& c : columns) idx.push_back(st->dataset->column_index(c));
      Json rows = Json::array();
      for (std::size_t i = offset; i < selection.size() && i < offset + limit; ++i) {
        const std::size_t r = selection.rows()[i];
        Json values = Json::array();
        for (std::size_t c : idx) values.push_back(analytics::cell_to_json(st->dataset->values(c)[r]));
        rows.push_back({{"key", labelvar::to_string(st->dataset->key(r))}, {"values", std::move(values)}});
      }
      out["total"] = selection.size();
      out["offset"] = offset;
      out["columns"] = columns;
      out["rows"] = std::move(rows);
    } else {
      throw ApiError(404, "unknown_widget", "no widget named '" + name + "'",
                     {{"widgets", {"overlap_table", "pearson", "scatter", "minority_profile", "concordance_metrics", "table"}}});
    }
    return out;
  });
}

Json Workbench::image(const std::string& id, const std::string& scan, const Params& params) const {
  return guarded([&] {
    const auto st = find(id)->snapshot();
    const OverlayEntry& entry = overlay_for(*st, scan);
    const auto layers = split_list(param(params, "layers", "raw,boxes"));
    Json out{{"scan_id", scan}, {"session_id", id}, {"revision", st->revision}};
    Json payload = Json::object();
    for (const auto& layer : layers) {
      if (layer == "raw") {
        payload["raw"] = {{"media_type", "image/png"},
                          {"base64", base64(read_file(st->overlays->image_root / entry.image_path))}};
      } else if (layer == "boxes") {
        Json boxes = Json::array();
        for (const auto& b : entry.bounding_boxes)
          boxes.push_back({{"subtype", b.subtype}, {"x", b.x}, {"y", b.y}, {"width", b.width}, {"height", b.height}});
        payload["boxes"] = std::move(boxes);
      } else if (layer == "heatmap") {
        if (!entry.heatmap_path)
          throw ApiError(409, "layer_absent", "scan '" + scan + "' has no heatmap", {{"scan", scan}, {"layer", layer}});
        payload["heatmap"] = {{"media_type", "image/png"},
                              {"base64", base64(read_file(st->overlays->image_root / *entry.heatmap_path))}};
      } else {
        throw ApiError(400, "bad_parameter", "unknown layer '" + layer + "' (expected raw, boxes or heatmap)",
                       {{"parameter", "layers"}, {"layer", layer}});
      }
    }
    out["layers"] = std::move(payload);
    return out;
  });
}

ImageBytes Workbench::image_bytes(const std::string& id, const std::string& scan, const Params& params) const {
  return guarded([&] {
    const auto st = find(id)->snapshot();
    const OverlayEntry& entry = overlay_for(*st, scan);
    const std::string layer = param(params, "layer", "raw");
    if (layer == "raw") return ImageBytes{"image/png", read_file(st->overlays->image_root / entry.image_path)};
    if (layer == "heatmap") {
      if (!entry.heatmap_path)
        throw ApiError(409, "layer_absent", "scan '" + scan + "' has no heatmap", {{"scan", scan}, {"layer", layer}});
      return ImageBytes{"image/png", read_file(st->overlays->image_root / *entry.heatmap_path)};
    }
    throw ApiError(400, "bad_parameter", "layer must be 'raw' or 'heatmap' for image bytes", {{"parameter", "layer"}});
  });
}

Json Workbench::save_state(const std::string& id) const {
  return guarded([&] {
    const auto st = find(id)->snapshot();
    Json keys = Json::array();
    for (const auto& k : st->selection.keys()) keys.push_back(labelvar::to_string(k));
    Json out;
    out["format"] = kStateFormat;
    out["fingerprint"] = st->fingerprint;
    out["manifest"] = st->manifest_path;
    out["tie_policy"] = ingest::to_string(st->tie_policy);
    out["gt_column"] = st->gt_column;
    out["threshold"] = st->threshold;
    out["named_queries"] = st->named_queries;
    out["selection"] = {{"provenance", st->selection.provenance()}, {"keys", std::move(keys)}};
    out["revision"] = st->revision;
    return out;
  });
}

Json Workbench::restore_state(const std::string& id, const Json& doc) {
  return guarded([&] {
    const auto source = find(id)->snapshot();
    if (!doc.is_object() || doc.empty()) throw ApiError(400, "invalid_document", "session document is empty");
    if (!doc.contains("format") || doc.at("format") != kStateFormat)
      throw ApiError(400, "invalid_document", fmt::format("session document must have format '{}'", kStateFormat));
    const std::string fingerprint = body_string(doc, "fingerprint");
    if (fingerprint != source->fingerprint) {
      throw ApiError(409, "fingerprint_mismatch", "the document was saved against a different dataset",
                     {{"expected", source->fingerprint}, {"found", fingerprint}});
    }
    SessionState state = *source;
    state.revision = 0;
    state.gt_column = body_string(doc, "gt_column");
    if (!state.gt_column.empty()) require_gt_column(*state.dataset, state.gt_column);
    if (!doc.contains("threshold")) throw ApiError(400, "invalid_document", "session document lacks 'threshold'");
    state.threshold = checked_threshold(doc.at("threshold"));
    state.named_queries.clear();
    if (doc.contains("named_queries")) {
      if (!doc.at("named_queries").is_object())
        throw ApiError(400, "invalid_document", "'named_queries' must map names to query texts");
      for (const auto& [name, text] : doc.at("named_queries").items()) {
        if (!text.is_string()) throw ApiError(400, "invalid_document", "'named_queries' must map names to query texts");
        state.named_queries[name] = text.get<std::string>();
      }
    }
    if (!doc.contains("selection") || !doc.at("selection").is_object() || !doc.at("selection").contains("keys"))
      throw ApiError(400, "invalid_document", "session document lacks 'selection.keys'");
    const Json& sel = doc.at("selection");
    std::string provenance = sel.contains("provenance") && sel.at("provenance").is_string()
                                 ? sel.at("provenance").get<std::string>()
                                 : std::string("restored");
    state.selection = selection_from_key_strings(*state.dataset, sel.at("keys"), std::move(provenance));

    Json out;
    out["session_id"] = register_session(std::move(state));
    out["revision"] = 0;
    out["restored_from"] = id;
    return out;
  });
}

}  // namespace labelvar::service
