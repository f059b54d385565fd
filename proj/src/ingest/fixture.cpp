#include "labelvar/ingest/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "labelvar/analytics/agreement.hpp"
#include "labelvar/analytics/correlation.hpp"
#include "labelvar/analytics/metrics.hpp"
#include "labelvar/core/errors.hpp"
#include "labelvar/ingest/csv.hpp"
#include "labelvar/ingest/derive.hpp"
#include "labelvar/ingest/fixture_solver.hpp"
#include "labelvar/ingest/loader.hpp"

namespace labelvar::ingest {

std::string annotation_column(std::string_view annotator, std::string_view subtype) {
  return fmt::format("{}_{}", annotator, subtype);
}

std::string prediction_column(std::string_view subtype) { return fmt::format("pred_{}", subtype); }

std::string reference_column(std::string_view subtype) { return std::string(subtype); }

namespace {

using nlohmann::ordered_json;

// Scores are emitted with six decimals, so all score arithmetic happens on
// integer millionths.
constexpr std::int64_t kScale = 1'000'000;
constexpr double kJitter = 0.02;
constexpr std::size_t kCandidateLimit = 64;

// mt19937_64 output is fixed by the standard, distributions and std::shuffle
// are not. These two keep fixtures identical across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t salt) {
  return std::mt19937_64(seed ^ (0x9E3779B97F4A7C15ULL * (salt + 1)));
}

struct Layout {
  std::size_t start = 0;
  std::size_t potential = 0;
  std::size_t reference = 0;

  bool in_reference(std::size_t pos) const { return pos >= start && pos < start + reference; }
};

struct SubtypeRows {
  std::vector<int> k;
  std::vector<char> positive;
  std::vector<std::vector<Cell>> labels;  // [annotator][position]
  std::vector<double> jitter;
  std::vector<std::int64_t> score;
  std::size_t zero_positives = 0;
};

std::size_t index_of(const std::vector<std::string>& names, const std::string& name) {
  return static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
}

class Builder {
 public:
  explicit Builder(const FixtureSpec& spec) : spec_(spec), n_(spec.n_scans), panel_(spec.annotators.size()) {}

  void place() {
    layout();
    rows_.resize(spec_.subtypes.size());
    for (std::size_t s = 0; s < spec_.subtypes.size(); ++s) decide(s);
  }

  void score_all() {
    for (std::size_t s = 0; s < spec_.subtypes.size(); ++s) {
      const auto& target = spec_.correlation_target;
      if (target && target->subtype == spec_.subtypes[s]) {
        fit_correlation(s, *target);
      } else {
        apply_mix(s, 0.5);
      }
    }
  }

  std::pair<double, double> scan_range(std::size_t s) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i <= 100; ++i) {
      if (auto r = correlation_at(s, i / 100.0)) {
        lo = std::min(lo, *r);
        hi = std::max(hi, *r);
      }
    }
    if (lo > hi) {
      throw InfeasibleSpecError(fmt::format("no correlation is defined for subtype '{}': agreement counts or scores "
                                            "have zero variance",
                                            spec_.subtypes[s]));
    }
    return {lo, hi};
  }

  GeneratedFixture emit() const;

 private:
  void layout();
  void decide(std::size_t s);
  void assign_labels(std::size_t s, const std::vector<std::optional<std::size_t>>& plus_demand,
                     const std::vector<std::optional<std::size_t>>& minus_demand,
                     const std::vector<std::size_t>& missing, std::mt19937_64& rng);

  std::int64_t score_for(std::size_t s, std::size_t pos, double t) const {
    const SubtypeRows& r = rows_[s];
    const double thr = spec_.threshold;
    const double frac = panel_ == 0 ? 0.0 : static_cast<double>(r.k[pos]) / static_cast<double>(panel_);
    const bool y = r.positive[pos] != 0;
    const double aligned = y ? std::max(frac, thr) : std::min(frac, thr - 1e-6);
    const double binary = y ? (1.0 + thr) / 2.0 : thr / 2.0;
    const double v = (1.0 - t) * aligned + t * binary + r.jitter[pos];
    const std::int64_t thr_units = std::llround(thr * kScale);
    const std::int64_t lo = y ? thr_units : 0;
    const std::int64_t hi = y ? kScale : thr_units - 1;
    return std::clamp<std::int64_t>(std::llround(v * kScale), lo, hi);
  }

  void apply_mix(std::size_t s, double t) {
    auto& r = rows_[s];
    r.score.resize(n_);
    for (std::size_t pos = 0; pos < n_; ++pos) r.score[pos] = score_for(s, pos, t);
  }

  std::optional<double> correlation_at(std::size_t s, double t) {
    apply_mix(s, t);
    std::vector<Cell> x(n_), y(n_);
    for (std::size_t pos = 0; pos < n_; ++pos) {
      x[pos] = static_cast<double>(rows_[s].k[pos]);
      y[pos] = static_cast<double>(rows_[s].score[pos]) / kScale;
    }
    try {
      return analytics::pearson(x, y).r;
    } catch (const DegenerateInputError&) {
      return std::nullopt;
    }
  }

  void fit_correlation(std::size_t s, const CorrelationTarget& target) {
    std::vector<double> ts;
    std::vector<std::optional<double>> rs;
    for (int i = 0; i <= 100; ++i) {
      ts.push_back(i / 100.0);
      rs.push_back(correlation_at(s, ts.back()));
    }
    double best_t = -1.0;
    double best_gap = std::numeric_limits<double>::infinity();
    auto consider = [&](double t, std::optional<double> r) {
      if (r && std::abs(*r - target.value) < best_gap) {
        best_gap = std::abs(*r - target.value);
        best_t = t;
      }
    };
    for (std::size_t i = 0; i < ts.size(); ++i) consider(ts[i], rs[i]);
    for (std::size_t i = 0; i + 1 < ts.size() && best_gap > target.tolerance / 4; ++i) {
      if (!rs[i] || !rs[i + 1]) continue;
      if ((*rs[i] - target.value) * (*rs[i + 1] - target.value) > 0) continue;
      double a = ts[i], b = ts[i + 1];
      const bool rising = *rs[i + 1] > *rs[i];
      for (int it = 0; it < 40; ++it) {
        const double mid = (a + b) / 2;
        const auto r = correlation_at(s, mid);
        if (!r) break;
        consider(mid, r);
        if ((*r < target.value) == rising) a = mid; else b = mid;
      }
    }
    if (best_t < 0 || best_gap > target.tolerance) {
      const auto [lo, hi] = scan_range(s);
      throw InfeasibleSpecError(fmt::format(
          "correlation target {} (tolerance {}) for subtype '{}' is outside the reachable range [{:.4f}, {:.4f}] "
          "given the count targets",
          target.value, target.tolerance, target.subtype, lo, hi));
    }
    apply_mix(s, best_t);
  }

  const FixtureSpec& spec_;
  std::size_t n_;
  std::size_t panel_;
  std::vector<Layout> layouts_;
  std::vector<SubtypeRows> rows_;
};

void Builder::layout() {
  layouts_.assign(spec_.subtypes.size(), {});
  for (std::size_t i = 0; i < spec_.subtypes.size(); ++i) {
    const std::string& s = spec_.subtypes[i];
    Layout& l = layouts_[i];
    std::size_t majority = 0;
    if (auto it = spec_.bucket_targets.find(s); it != spec_.bucket_targets.end()) {
      for (const auto& [k, b] : it->second) {
        l.potential += b.cases;
        if (2 * static_cast<std::size_t>(k) > panel_) majority += b.cases;
      }
    }

    std::optional<std::size_t> reference;
    std::string source;
    if (auto it = spec_.reference_positives.find(s); it != spec_.reference_positives.end()) {
      reference = it->second;
      source = "reference_positives";
    }
    for (const auto& c : spec_.confusion_targets) {
      if (c.gt_subtype != s) continue;
      if (reference && *reference != c.positives) {
        throw InfeasibleSpecError(fmt::format(
            "subtype '{}' has {} reference positives from {} but confusion target ({}, {}) asks for {}", s,
            *reference, source, c.gt_subtype, c.pred_subtype, c.positives));
      }
      reference = c.positives;
      source = fmt::format("confusion target ({}, {})", c.gt_subtype, c.pred_subtype);
    }
    l.reference = reference.value_or(majority);
    if (l.reference > l.potential) {
      throw InfeasibleSpecError(fmt::format(
          "subtype '{}' needs {} reference positives but only {} scans have a positive annotator", s, l.reference,
          l.potential));
    }

    for (const auto& c : spec_.cooccurrence_targets) {
      if (c.second != s) continue;
      const std::size_t first = index_of(spec_.subtypes, c.first);
      if (first >= i) {
        throw InfeasibleSpecError(fmt::format(
            "co-occurrence ({}, {}): '{}' must be listed before '{}' in subtypes", c.first, c.second, c.first, s));
      }
      const Layout& f = layouts_[first];
      if (c.count > f.reference || c.count > l.reference) {
        throw InfeasibleSpecError(fmt::format(
            "co-occurrence ({}, {}) of {} exceeds the reference positives ({} and {})", c.first, c.second, c.count,
            f.reference, l.reference));
      }
      l.start = f.start + f.reference - c.count;
    }
    if (l.start + l.potential > n_) {
      throw InfeasibleSpecError(fmt::format(
          "subtype '{}' does not fit: its {} potential cases start at row {} of {}", s, l.potential, l.start, n_));
    }
  }
}

void Builder::decide(std::size_t s) {
  const std::string& name = spec_.subtypes[s];
  const Layout& l = layouts_[s];
  SubtypeRows& r = rows_[s];
  auto rng = stream(spec_.seed, s);

  std::map<int, BucketTarget, std::greater<>> buckets;
  if (auto it = spec_.bucket_targets.find(name); it != spec_.bucket_targets.end())
    buckets.insert(it->second.begin(), it->second.end());

  r.k.assign(n_, 0);
  std::size_t pos = l.start;
  for (const auto& [k, b] : buckets) {
    for (std::size_t c = 0; c < b.cases; ++c) r.k[pos++] = k;
  }
  r.jitter.resize(n_);
  for (auto& j : r.jitter) j = (unit(rng) - 0.5) * 2 * kJitter;

  std::vector<std::size_t> zero;
  for (std::size_t p = 0; p < n_; ++p)
    if (r.k[p] == 0) zero.push_back(p);

  // Constraints of the cell search: one per bucket, one for rows without a
  // positive annotator, one per confusion target on this prediction.
  std::vector<std::size_t> targets;
  std::map<int, std::size_t> bucket_constraint;
  std::size_t model_positives = 0;
  for (const auto& [k, b] : buckets) {
    bucket_constraint[k] = targets.size();
    targets.push_back(b.model_positives);
    model_positives += b.model_positives;
  }
  const std::size_t zero_constraint = targets.size();
  targets.push_back(0);
  std::vector<std::pair<std::size_t, std::size_t>> confusion;  // (gt subtype, constraint)
  for (const auto& c : spec_.confusion_targets) {
    if (c.pred_subtype != name) continue;
    confusion.emplace_back(index_of(spec_.subtypes, c.gt_subtype), targets.size());
    targets.push_back(c.true_positives);
  }

  // Rows that differ only in position are interchangeable; group the rest.
  std::map<std::pair<int, std::uint64_t>, std::vector<std::size_t>> cells;
  for (std::size_t p = 0; p < n_; ++p) {
    std::uint64_t mask = 0;
    for (std::size_t t = 0; t < confusion.size(); ++t)
      if (layouts_[confusion[t].first].in_reference(p)) mask |= 1ULL << t;
    cells[{r.k[p], mask}].push_back(p);
  }
  std::vector<solver::CellGroup> groups;
  for (const auto& [sig, members] : cells) {
    solver::CellGroup g;
    g.size = members.size();
    g.constraints.push_back(sig.first == 0 ? zero_constraint : bucket_constraint.at(sig.first));
    for (std::size_t t = 0; t < confusion.size(); ++t)
      if (sig.second & (1ULL << t)) g.constraints.push_back(confusion[t].second);
    groups.push_back(std::move(g));
  }

  // Label groups: rows with k positive annotators on the model-positive side
  // and on the model-negative side.
  std::vector<solver::LabelGroup> plus, minus;
  for (const auto& [k, b] : buckets) {
    plus.push_back({k, b.model_positives});
    minus.push_back({k, b.cases - b.model_positives});
  }

  struct Targeted {
    std::size_t annotator;
    const AnnotatorMetricTarget* target;
  };
  std::vector<Targeted> targeted;
  for (const auto& t : spec_.per_annotator_metric_targets)
    if (t.subtype == name) targeted.push_back({index_of(spec_.annotators, t.annotator), &t});

  bool cells_ever = false;
  bool annotators_ever = targeted.empty();
  std::string unreachable;
  for (std::size_t m0 = 0; m0 <= zero.size(); ++m0) {
    targets[zero_constraint] = m0;
    auto counts = solver::solve_cell_counts(groups, targets);
    if (!counts) continue;
    cells_ever = true;

    std::vector<std::optional<std::size_t>> plus_demand(panel_), minus_demand(panel_);
    std::vector<std::size_t> missing(panel_, 0);
    bool annotators_ok = targeted.empty();
    if (!targeted.empty()) {
      std::vector<std::vector<solver::AnnotatorCandidate>> options;
      for (const auto& t : targeted) {
        auto c = solver::annotator_candidates(t.target->accuracy, t.target->f1, t.target->tolerance,
                                              t.target->positive_count, model_positives + m0, n_, zero.size() - m0);
        if (c.empty()) {
          unreachable = t.target->annotator;
          break;
        }
        if (c.size() > kCandidateLimit) c.resize(kCandidateLimit);
        options.push_back(std::move(c));
      }
      if (options.size() == targeted.size()) {
        std::vector<std::size_t> pick(options.size(), 0);
        while (!annotators_ok) {
          for (std::size_t i = 0; i < targeted.size(); ++i) {
            const auto& c = options[i][pick[i]];
            const std::size_t a = targeted[i].annotator;
            plus_demand[a] = c.true_positives;
            minus_demand[a] = targeted[i].target->positive_count - c.true_positives;
            missing[a] = n_ - c.evaluated;
          }
          annotators_ok = solver::distribute_labels(plus, plus_demand) && solver::distribute_labels(minus, minus_demand);
          if (annotators_ok) break;
          std::size_t i = 0;
          while (i < pick.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
          if (i == pick.size()) break;
        }
      }
    }
    if (!annotators_ok) continue;
    annotators_ever = true;

    r.zero_positives = m0;
    r.positive.assign(n_, 0);
    std::size_t g = 0;
    for (auto& [sig, members] : cells) {
      shuffle(members, rng);
      for (std::size_t i = 0; i < (*counts)[g]; ++i) r.positive[members[i]] = 1;
      ++g;
    }
    assign_labels(s, plus_demand, minus_demand, missing, rng);
    return;
  }

  if (!cells_ever) {
    throw InfeasibleSpecError(fmt::format(
        "pred_{}: no placement of model positives meets the bucket model_positives together with the confusion "
        "targets on this prediction",
        name));
  }
  if (!annotators_ever && !unreachable.empty()) {
    throw InfeasibleSpecError(fmt::format(
        "annotator '{}' on subtype '{}': no labelling reaches the requested accuracy, f1 and positive_count "
        "against pred_{}",
        unreachable, name, name));
  }
  throw InfeasibleSpecError(fmt::format(
      "per-annotator targets on subtype '{}' cannot be met together with its agreement buckets", name));
}

void Builder::assign_labels(std::size_t s, const std::vector<std::optional<std::size_t>>& plus_demand,
                            const std::vector<std::optional<std::size_t>>& minus_demand,
                            const std::vector<std::size_t>& missing, std::mt19937_64& rng) {
  SubtypeRows& r = rows_[s];
  r.labels.assign(panel_, std::vector<Cell>(n_, Cell{0.0}));

  for (int side = 1; side >= 0; --side) {
    std::map<int, std::vector<std::size_t>, std::greater<>> by_k;
    for (std::size_t p = 0; p < n_; ++p)
      if (r.k[p] > 0 && r.positive[p] == side) by_k[r.k[p]].push_back(p);
    std::vector<solver::LabelGroup> groups;
    for (const auto& [k, members] : by_k) groups.push_back({k, members.size()});
    auto split = solver::distribute_labels(groups, side ? plus_demand : minus_demand);
    if (!split) throw std::logic_error("label distribution became infeasible after it was checked");

    std::size_t g = 0;
    for (auto& [k, members] : by_k) {
      shuffle(members, rng);
      // Consecutive runs that wrap around give every row k distinct annotators
      // because no annotator gets more ones than there are rows.
      std::size_t cursor = 0;
      for (std::size_t a = 0; a < panel_; ++a) {
        for (std::size_t i = 0; i < (*split)[g][a]; ++i) {
          r.labels[a][members[cursor % members.size()]] = 1.0;
          ++cursor;
        }
      }
      ++g;
    }
  }

  std::vector<std::size_t> pool;
  for (std::size_t p = 0; p < n_; ++p)
    if (r.k[p] == 0 && !r.positive[p]) pool.push_back(p);
  shuffle(pool, rng);
  std::size_t offset = 0;
  for (std::size_t a = 0; a < panel_; ++a) {
    for (std::size_t i = 0; i < missing[a]; ++i) r.labels[a][pool[(offset + i) % pool.size()]] = Missing{};
    offset += missing[a];
  }
}

std::string format_units(std::int64_t units) {
  return fmt::format("{}.{:06d}", units / kScale, units % kScale);
}

ordered_json target_pair(double target, double realized) { return {{"target", target}, {"realized", realized}}; }

ordered_json count_pair(std::size_t target, std::size_t realized) {
  return {{"target", target}, {"realized", realized}};
}

std::size_t count_ones(const Dataset& d, std::string_view column) {
  std::size_t n = 0;
  for (const Cell& c : d.values(column))
    if (const double* v = number_if(c); v && *v == 1.0) ++n;
  return n;
}

// Checks every target against what analytics reads back from the dataset.
ordered_json verify(const FixtureSpec& spec, const Dataset& loaded, bool& all_met) {
  all_met = true;
  Dataset d = loaded;
  for (const auto& s : spec.subtypes) d = derive_agreement(d, s);

  ordered_json summary;
  summary["n_scans"] = d.row_count();
  summary["seed"] = spec.seed;

  ordered_json buckets = ordered_json::object();
  for (const auto& [s, targets] : spec.bucket_targets) {
    const auto table = analytics::overlap_table(d, s, prediction_column(s), spec.threshold);
    ordered_json rows = ordered_json::array();
    for (auto it = targets.rbegin(); it != targets.rend(); ++it) {
      const auto& [k, b] = *it;
      std::size_t cases = 0, model_true = 0;
      for (const auto& row : table) {
        if (row.k == k) {
          cases = row.cases;
          model_true = row.model_true;
        }
      }
      all_met = all_met && cases == b.cases && model_true == b.model_positives;
      rows.push_back({{"k", k}, {"cases", count_pair(b.cases, cases)},
                      {"model_positives", count_pair(b.model_positives, model_true)}});
    }
    buckets[s] = std::move(rows);
  }
  summary["buckets"] = std::move(buckets);

  ordered_json reference = ordered_json::object();
  for (const auto& s : spec.subtypes) reference[s] = count_ones(d, reference_column(s));
  summary["reference_positives"] = std::move(reference);
  for (const auto& [s, want] : spec.reference_positives) all_met = all_met && count_ones(d, reference_column(s)) == want;

  ordered_json confusion = ordered_json::array();
  for (const auto& c : spec.confusion_targets) {
    const auto m = analytics::metrics(d, reference_column(c.gt_subtype), prediction_column(c.pred_subtype),
                                      spec.threshold);
    all_met = all_met && m.tp == c.true_positives && m.support_positive == c.positives;
    confusion.push_back({{"gt_subtype", c.gt_subtype}, {"pred_subtype", c.pred_subtype},
                         {"true_positives", count_pair(c.true_positives, m.tp)},
                         {"positives", count_pair(c.positives, m.support_positive)}, {"recall", m.recall}});
  }
  summary["confusion"] = std::move(confusion);

  ordered_json cooccurrence = ordered_json::array();
  for (const auto& c : spec.cooccurrence_targets) {
    const auto a = d.values(reference_column(c.first));
    const auto b = d.values(reference_column(c.second));
    std::size_t both = 0;
    for (std::size_t i = 0; i < d.row_count(); ++i) {
      const double* x = number_if(a[i]);
      const double* y = number_if(b[i]);
      if (x && y && *x == 1.0 && *y == 1.0) ++both;
    }
    all_met = all_met && both == c.count;
    cooccurrence.push_back({{"first", c.first}, {"second", c.second}, {"count", count_pair(c.count, both)}});
  }
  summary["cooccurrence"] = std::move(cooccurrence);

  if (spec.correlation_target) {
    const auto& t = *spec.correlation_target;
    const double r = analytics::pearson(d, agree_count_column(t.subtype), prediction_column(t.subtype)).r;
    all_met = all_met && std::abs(r - t.value) <= t.tolerance;
    ordered_json c = target_pair(t.value, r);
    c["subtype"] = t.subtype;
    c["tolerance"] = t.tolerance;
    summary["correlation"] = std::move(c);
  }

  ordered_json annotators = ordered_json::array();
  for (const auto& t : spec.per_annotator_metric_targets) {
    const auto m = analytics::metrics(d, annotation_column(t.annotator, t.subtype), prediction_column(t.subtype),
                                      spec.threshold);
    all_met = all_met && std::abs(m.accuracy - t.accuracy) <= t.tolerance && std::abs(m.f1 - t.f1) <= t.tolerance &&
              m.support_positive == t.positive_count;
    annotators.push_back({{"annotator", t.annotator}, {"subtype", t.subtype},
                          {"accuracy", target_pair(t.accuracy, m.accuracy)}, {"f1", target_pair(t.f1, m.f1)},
                          {"positive_count", count_pair(t.positive_count, m.support_positive)},
                          {"missing_labels", m.n_excluded}});
  }
  summary["per_annotator"] = std::move(annotators);
  summary["all_met"] = all_met;
  summary["fingerprint"] = loaded.fingerprint();
  return summary;
}

GeneratedFixture Builder::emit() const {
  IngestManifest manifest;
  manifest.data_path = "fixture.csv";
  manifest.key_column = "scan_id";

  std::vector<std::string> header{"scan_id"};
  for (const auto& s : spec_.subtypes) {
    header.push_back(reference_column(s));
    manifest.column_roles[header.back()] = {ColumnRole::metadata, std::nullopt, s, ValueKind::binary};
  }
  for (const auto& s : spec_.subtypes) {
    for (const auto& a : spec_.annotators) {
      header.push_back(annotation_column(a, s));
      manifest.column_roles[header.back()] = {ColumnRole::annotation, a, s, ValueKind::binary};
    }
  }
  for (const auto& s : spec_.subtypes) {
    header.push_back(prediction_column(s));
    manifest.column_roles[header.back()] = {ColumnRole::prediction, std::nullopt, s, ValueKind::score};
  }

  std::vector<std::size_t> order(n_);
  for (std::size_t i = 0; i < n_; ++i) order[i] = i;
  auto rng = stream(spec_.seed, spec_.subtypes.size() + 1);
  shuffle(order, rng);
  const std::size_t width = std::max<std::size_t>(4, fmt::format("{}", n_).size());

  std::ostringstream out;
  write_delimited_row(out, header);
  std::vector<std::string> fields;
  for (std::size_t row = 0; row < n_; ++row) {
    const std::size_t pos = order[row];
    fields.clear();
    fields.push_back(fmt::format("{}-{:0{}}", spec_.id_prefix, row + 1, width));
    for (std::size_t s = 0; s < spec_.subtypes.size(); ++s)
      fields.push_back(layouts_[s].in_reference(pos) ? "1" : "0");
    for (std::size_t s = 0; s < spec_.subtypes.size(); ++s) {
      for (std::size_t a = 0; a < panel_; ++a) {
        const Cell& c = rows_[s].labels[a][pos];
        fields.push_back(is_missing(c) ? "" : cell_to_string(c));
      }
    }
    for (std::size_t s = 0; s < spec_.subtypes.size(); ++s) fields.push_back(format_units(rows_[s].score[pos]));
    write_delimited_row(out, fields);
  }

  GeneratedFixture fixture;
  fixture.data_text = out.str();
  std::istringstream in(fixture.data_text);
  fixture.dataset = load(manifest, in);
  fixture.manifest = std::move(manifest);

  bool all_met = false;
  fixture.summary = verify(spec_, fixture.dataset, all_met);
  if (!all_met) throw std::logic_error("generated fixture misses its own targets: " + fixture.summary.dump());
  return fixture;
}

}  // namespace

GeneratedFixture generate_fixture(const FixtureSpec& spec) {
  validate(spec);
  Builder builder(spec);
  builder.place();
  builder.score_all();
  return builder.emit();
}

std::pair<double, double> correlation_range(const FixtureSpec& spec) {
  validate(spec);
  if (spec.subtypes.empty()) throw InfeasibleSpecError("a correlation needs at least one subtype");
  const std::string& subtype = spec.correlation_target ? spec.correlation_target->subtype : spec.subtypes.front();
  Builder builder(spec);
  builder.place();
  return builder.scan_range(index_of(spec.subtypes, subtype));
}

std::filesystem::path write_fixture(const GeneratedFixture& fixture, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw LoadError(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));
  const auto data_path = out_dir / fixture.manifest.data_path;
  {
    std::ofstream out(data_path, std::ios::binary);
    out << fixture.data_text;
    if (!out) throw LoadError(fmt::format("cannot write '{}'", data_path.string()));
  }
  const auto manifest_path = out_dir / "manifest.json";
  write_manifest(fixture.manifest, manifest_path);
  return manifest_path;
}

}  // namespace labelvar::ingest
