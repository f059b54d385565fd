#pragma once

// Random inputs and brute-force reference implementations shared by the unit
// tests and the acceptance runner. The references deliberately avoid the
// library's own helpers so the two can be compared.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "labelvar/core/dataset.hpp"
#include "labelvar/ingest/fixture.hpp"
#include "labelvar/query/ast.hpp"

namespace testing {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// ---------------------------------------------------------------------------
// Query language

inline bool is_keyword(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s == "and" || s == "or" || s == "not" || s == "in";
}

inline std::string random_identifier(Rng& rng) {
  static const std::string first = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
  static const std::string rest = first + "0123456789";
  for (;;) {
    std::string s(1, first[pick(rng, 0, first.size() - 1)]);
    const std::size_t len = pick(rng, 0, 7);
    for (std::size_t i = 0; i < len; ++i) s += rest[pick(rng, 0, rest.size() - 1)];
    if (!is_keyword(s)) return s;
  }
}

inline double random_number(Rng& rng) {
  switch (pick(rng, 0, 4)) {
    case 0: return static_cast<double>(static_cast<int>(pick(rng, 0, 20)) - 10);
    case 1: return uniform(rng, -1.0, 1.0);
    case 2: return uniform(rng, -1.0, 1.0) * std::pow(10.0, static_cast<int>(pick(rng, 0, 30)) - 15);
    case 3: return std::round(uniform(rng, 0.0, 1000.0)) / 100.0;
    default: return 0.0;
  }
}

inline std::string random_text(Rng& rng) {
  static const std::string alphabet = "abcXYZ 019_-.,\"\\()[]<>=!and or\t";
  std::string s;
  const std::size_t len = pick(rng, 0, 8);
  for (std::size_t i = 0; i < len; ++i) s += alphabet[pick(rng, 0, alphabet.size() - 1)];
  if (coin(rng, 0.1)) s += "\xC3\xA9";  // a UTF-8 letter
  return s;
}

struct QueryShape {
  std::vector<std::string> columns;  // empty: invent identifiers
  std::vector<labelvar::query::Literal> literals;  // empty: invent literals
  int max_depth = 5;
};

inline labelvar::query::Literal random_literal(Rng& rng, const QueryShape& shape) {
  if (!shape.literals.empty()) return shape.literals[pick(rng, 0, shape.literals.size() - 1)];
  if (coin(rng, 0.6)) return random_number(rng);
  return random_text(rng);
}

inline labelvar::query::Query random_query(Rng& rng, const QueryShape& shape, int depth = 1) {
  using namespace labelvar::query;
  const auto column = [&] {
    return shape.columns.empty() ? random_identifier(rng) : shape.columns[pick(rng, 0, shape.columns.size() - 1)];
  };
  const bool leaf = depth >= shape.max_depth || coin(rng, depth == 1 ? 0.15 : 0.4);
  if (leaf) {
    if (coin(rng, 0.8)) {
      const auto op = static_cast<CompareOp>(pick(rng, 0, 5));
      return Query::compare(column(), op, random_literal(rng, shape));
    }
    std::vector<Literal> values(pick(rng, 1, 4));
    for (auto& v : values) v = random_literal(rng, shape);
    return Query::in(column(), std::move(values));
  }
  switch (pick(rng, 0, 2)) {
    case 0: return Query::negate(random_query(rng, shape, depth + 1));
    case 1:
    case 2: {
      std::vector<Query> children(pick(rng, 2, 3), Query::compare("x", CompareOp::eq, 0.0));
      for (auto& c : children) c = random_query(rng, shape, depth + 1);
      return pick(rng, 1, 2) == 1 ? Query::all_of(std::move(children)) : Query::any_of(std::move(children));
    }
  }
  return Query::compare(column(), CompareOp::eq, 0.0);
}

// Row-by-row interpreter written straight from the semantics: a comparison on
// a missing cell or across number and text is false, Not flips booleans.
inline bool naive_compare(const labelvar::Cell& cell, labelvar::query::CompareOp op,
                          const labelvar::query::Literal& literal) {
  using labelvar::query::CompareOp;
  int sign = 0;
  if (const double* c = std::get_if<double>(&cell)) {
    const double* l = std::get_if<double>(&literal);
    if (!l) return false;
    sign = *c < *l ? -1 : (*c > *l ? 1 : 0);
  } else if (const std::string* c = std::get_if<std::string>(&cell)) {
    const std::string* l = std::get_if<std::string>(&literal);
    if (!l) return false;
    const int r = c->compare(*l);
    sign = r < 0 ? -1 : (r > 0 ? 1 : 0);
  } else {
    return false;
  }
  switch (op) {
    case CompareOp::eq: return sign == 0;
    case CompareOp::ne: return sign != 0;
    case CompareOp::lt: return sign < 0;
    case CompareOp::le: return sign <= 0;
    case CompareOp::gt: return sign > 0;
    case CompareOp::ge: return sign >= 0;
  }
  return false;
}

inline bool naive_matches(const labelvar::query::Node& node, const labelvar::Dataset& d, std::size_t row) {
  using namespace labelvar::query;
  if (const auto* c = std::get_if<Compare>(&node.value)) return naive_compare(d.values(c->column)[row], c->op, c->literal);
  if (const auto* in = std::get_if<In>(&node.value)) {
    for (const auto& v : in->values)
      if (naive_compare(d.values(in->column)[row], CompareOp::eq, v)) return true;
    return false;
  }
  if (const auto* n = std::get_if<Not>(&node.value)) return !naive_matches(*n->child, d, row);
  if (const auto* a = std::get_if<And>(&node.value)) {
    for (const auto& c : a->children)
      if (!naive_matches(*c, d, row)) return false;
    return true;
  }
  const auto& o = std::get<Or>(node.value);
  for (const auto& c : o.children)
    if (naive_matches(*c, d, row)) return true;
  return false;
}

inline std::vector<std::size_t> naive_select(const labelvar::query::Query& q, const labelvar::Dataset& d) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < d.row_count(); ++r)
    if (naive_matches(q.root(), d, r)) rows.push_back(r);
  return rows;
}

// Numeric columns n0..n3 drawn from a small value set (so equality hits) and
// text columns t0, t1, all with missing cells.
inline labelvar::Dataset random_query_dataset(Rng& rng, std::size_t rows) {
  using namespace labelvar;
  std::vector<ColumnSchema> schema;
  std::vector<std::vector<Cell>> cols;
  const double missing_rate = uniform(rng, 0.0, 0.4);
  for (int i = 0; i < 4; ++i) {
    schema.push_back({"n" + std::to_string(i), ColumnRole::metadata, {}, {}, ValueKind::numeric});
    std::vector<Cell> v(rows);
    for (auto& c : v) {
      if (coin(rng, missing_rate)) c = Missing{};
      else c = coin(rng, 0.8) ? static_cast<double>(pick(rng, 0, 4)) - 1.0 : uniform(rng, -2.0, 3.0);
    }
    cols.push_back(std::move(v));
  }
  static const std::vector<std::string> words = {"a", "b", "c", "ab", "B", ""};
  for (int i = 0; i < 2; ++i) {
    schema.push_back({"t" + std::to_string(i), ColumnRole::metadata, {}, {}, ValueKind::text});
    std::vector<Cell> v(rows);
    for (auto& c : v) {
      if (coin(rng, missing_rate)) c = Missing{};
      else c = words[pick(rng, 0, words.size() - 1)];
    }
    cols.push_back(std::move(v));
  }
  std::vector<ScanKey> keys;
  for (std::size_t r = 0; r < rows; ++r) keys.push_back({"s" + std::to_string(r), {}});
  return Dataset(Level::ct, std::move(schema), std::move(keys), std::move(cols));
}

inline QueryShape query_shape_for_random_dataset() {
  QueryShape shape;
  shape.columns = {"n0", "n1", "n2", "n3", "t0", "t1"};
  shape.literals = {-1.0, 0.0, 1.0, 2.0, 0.5, 2.5, std::string("a"), std::string("b"), std::string("ab"),
                    std::string("")};
  return shape;
}

// ---------------------------------------------------------------------------
// Metrics

// A panel of annotators a0..aK-1 on subtype "any" plus a score column
// pred_any, with random missingness in every column.
inline labelvar::Dataset random_panel(Rng& rng, std::size_t rows, std::size_t annotators) {
  using namespace labelvar;
  std::vector<ColumnSchema> schema;
  std::vector<std::vector<Cell>> cols;
  for (std::size_t a = 0; a < annotators; ++a) {
    const std::string name = "a" + std::to_string(a);
    schema.push_back({name + "_any", ColumnRole::annotation, name, "any", ValueKind::binary});
    const double missing_rate = coin(rng, 0.2) ? 1.0 : uniform(rng, 0.0, 0.5);
    const double positive_rate = uniform(rng);
    std::vector<Cell> v(rows);
    for (auto& c : v) c = coin(rng, missing_rate) ? Cell{Missing{}} : Cell{coin(rng, positive_rate) ? 1.0 : 0.0};
    cols.push_back(std::move(v));
  }
  schema.push_back({"pred_any", ColumnRole::prediction, {}, "any", ValueKind::score});
  std::vector<Cell> scores(rows);
  const double missing_rate = uniform(rng, 0.0, 0.3);
  for (auto& c : scores) {
    if (coin(rng, missing_rate)) c = Missing{};
    else c = coin(rng, 0.2) ? std::round(uniform(rng) * 4) / 4 : uniform(rng);
  }
  cols.push_back(std::move(scores));
  std::vector<ScanKey> keys;
  for (std::size_t r = 0; r < rows; ++r) keys.push_back({"s" + std::to_string(r), {}});
  return Dataset(Level::ct, std::move(schema), std::move(keys), std::move(cols));
}

struct BruteConfusion {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

inline BruteConfusion brute_confusion(std::span<const labelvar::Cell> gt, std::span<const labelvar::Cell> score,
                                      double threshold) {
  BruteConfusion c;
  for (std::size_t r = 0; r < gt.size(); ++r) {
    const double* g = std::get_if<double>(&gt[r]);
    const double* s = std::get_if<double>(&score[r]);
    if (!g || !s) continue;
    const bool truth = *g == 1.0;
    const bool said = *s >= threshold;
    if (truth && said) ++c.tp;
    else if (!truth && !said) ++c.tn;
    else if (!truth && said) ++c.fp;
    else ++c.fn;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Aggregation

struct SliceTable {
  labelvar::Dataset dataset;
  // scan id -> per annotation/prediction column maximum over present slices
  std::map<std::string, std::map<std::string, labelvar::Cell>> expected_max;
  std::vector<std::string> scan_order;
};

inline SliceTable random_slice_table(Rng& rng) {
  using namespace labelvar;
  const std::size_t scans = pick(rng, 1, 12);
  const std::size_t annotators = pick(rng, 1, 4);
  std::vector<ColumnSchema> schema;
  for (std::size_t a = 0; a < annotators; ++a) {
    const std::string name = "r" + std::to_string(a);
    schema.push_back({name + "_any", ColumnRole::annotation, name, "any", ValueKind::binary});
  }
  schema.push_back({"pred_any", ColumnRole::prediction, {}, "any", ValueKind::score});

  // Slices of different scans are interleaved and listed out of order.
  std::vector<std::pair<std::string, std::uint32_t>> slice_keys;
  SliceTable out;
  for (std::size_t s = 0; s < scans; ++s) {
    const std::string id = "scan" + std::to_string(s);
    out.scan_order.push_back(id);
    std::vector<std::uint32_t> idx(pick(rng, 1, 6));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i * 3 + pick(rng, 0, 2));
    for (auto i : idx) slice_keys.emplace_back(id, i);
  }
  std::shuffle(slice_keys.begin(), slice_keys.end(), rng);
  // Scans appear in the order of their first slice.
  out.scan_order.clear();
  for (const auto& [id, i] : slice_keys)
    if (std::find(out.scan_order.begin(), out.scan_order.end(), id) == out.scan_order.end())
      out.scan_order.push_back(id);

  std::vector<std::vector<Cell>> cols(schema.size(), std::vector<Cell>(slice_keys.size()));
  for (std::size_t row = 0; row < slice_keys.size(); ++row) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      Cell v;
      if (coin(rng, 0.3)) v = Missing{};
      else if (c < annotators) v = coin(rng, 0.3) ? 1.0 : 0.0;
      else v = uniform(rng);
      cols[c][row] = v;
      auto& best = out.expected_max[slice_keys[row].first][schema[c].name];
      if (const double* d = std::get_if<double>(&v)) {
        const double* b = std::get_if<double>(&best);
        if (!b || *d > *b) best = *d;
      }
    }
  }
  std::vector<ScanKey> keys;
  for (const auto& [id, i] : slice_keys) keys.push_back({id, i});
  out.dataset = Dataset(Level::slice, schema, std::move(keys), std::move(cols));
  return out;
}

// ---------------------------------------------------------------------------
// Fixture specs

// A spec whose count targets are feasible by construction: potential cases
// fit in the scan count, model positives never exceed cases, and a
// self-confusion target picks its true positives inside the range the
// reference rows allow (reference rows are the highest-agreement rows).
inline labelvar::ingest::FixtureSpec random_feasible_spec(Rng& rng, std::uint64_t seed) {
  using namespace labelvar::ingest;
  FixtureSpec spec;
  spec.seed = seed;
  spec.n_scans = pick(rng, 30, 400);
  const std::size_t panel = pick(rng, 2, 5);
  for (std::size_t a = 0; a < panel; ++a) spec.annotators.push_back("rad" + std::to_string(a + 1));
  static const std::vector<std::string> names = {"any", "epidural", "subdural", "intraventricular"};
  const std::size_t n_subtypes = pick(rng, 1, 3);
  spec.subtypes.assign(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(n_subtypes));

  std::size_t budget = spec.n_scans;
  for (const auto& s : spec.subtypes) {
    auto& buckets = spec.bucket_targets[s];
    const std::size_t share = budget / 2;
    std::size_t used = 0;
    for (std::size_t k = panel; k >= 1; --k) {
      if (coin(rng, 0.15)) continue;  // leave some buckets empty
      const std::size_t cases = pick(rng, 1, std::max<std::size_t>(1, share / panel));
      if (used + cases > share) break;
      used += cases;
      buckets[static_cast<int>(k)] = {cases, pick(rng, 0, cases)};
    }
    budget -= used;
  }

  auto potential = [&](const std::string& s) {
    std::size_t p = 0;
    for (const auto& [k, b] : spec.bucket_targets[s]) p += b.cases;
    return p;
  };
  std::map<std::string, std::size_t> reference;
  for (const auto& s : spec.subtypes) {
    std::size_t majority = 0;
    for (const auto& [k, b] : spec.bucket_targets[s])
      if (2 * static_cast<std::size_t>(k) > panel) majority += b.cases;
    reference[s] = majority;
    if (coin(rng, 0.3)) {
      reference[s] = pick(rng, 0, potential(s));
      spec.reference_positives[s] = reference[s];
    }
  }

  for (const auto& s : spec.subtypes) {
    if (!coin(rng, 0.5)) continue;
    // Reference rows fill the buckets from the highest k down.
    std::size_t left = reference[s], lo = 0, hi = 0;
    for (auto it = spec.bucket_targets[s].rbegin(); it != spec.bucket_targets[s].rend(); ++it) {
      const auto& b = it->second;
      const std::size_t in_ref = std::min(left, b.cases);
      left -= in_ref;
      lo += b.model_positives > b.cases - in_ref ? b.model_positives - (b.cases - in_ref) : 0;
      hi += std::min(b.model_positives, in_ref);
    }
    spec.confusion_targets.push_back({s, s, pick(rng, lo, hi), reference[s]});
  }

  if (spec.subtypes.size() >= 2 && coin(rng, 0.5)) {
    const auto& a = spec.subtypes[0];
    const auto& b = spec.subtypes[1];
    spec.cooccurrence_targets.push_back({a, b, pick(rng, 0, std::min(reference[a], reference[b]))});
  }
  return spec;
}

}  // namespace testing
