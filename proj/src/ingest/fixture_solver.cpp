#include "labelvar/ingest/fixture_solver.hpp"

#include <algorithm>
#include <cmath>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/edmonds_karp_max_flow.hpp>

#include "labelvar/analytics/metrics.hpp"

namespace labelvar::ingest::solver {

namespace {

class CellSearch {
 public:
  CellSearch(std::span<const CellGroup> cells, std::span<const std::size_t> targets, std::size_t node_limit)
      : cells_(cells), need_(targets.begin(), targets.end()), capacity_(targets.size(), 0), limit_(node_limit) {
    for (const auto& cell : cells_) {
      for (std::size_t c : cell.constraints) capacity_[c] += cell.size;
    }
    choice_.assign(cells_.size(), 0);
  }

  bool run() {
    for (std::size_t c = 0; c < need_.size(); ++c) {
      if (need_[c] > capacity_[c]) return false;
    }
    return step(0);
  }

  std::vector<std::size_t> choice() const { return choice_; }

 private:
  bool step(std::size_t i) {
    if (++nodes_ > limit_) return false;
    if (i == cells_.size()) {
      return std::all_of(need_.begin(), need_.end(), [](std::size_t n) { return n == 0; });
    }
    const CellGroup& cell = cells_[i];
    std::size_t lo = 0;
    std::size_t hi = cell.size;
    for (std::size_t c : cell.constraints) {
      hi = std::min(hi, need_[c]);
      const std::size_t rest = capacity_[c] - cell.size;
      if (need_[c] > rest) lo = std::max(lo, need_[c] - rest);
    }
    for (std::size_t c : cell.constraints) capacity_[c] -= cell.size;
    bool found = false;
    for (std::size_t x = lo; x <= hi && !found; ++x) {
      for (std::size_t c : cell.constraints) need_[c] -= x;
      choice_[i] = x;
      found = step(i + 1);
      if (!found) {
        for (std::size_t c : cell.constraints) need_[c] += x;
      }
    }
    if (!found) {
      for (std::size_t c : cell.constraints) capacity_[c] += cell.size;
    }
    return found;
  }

  std::span<const CellGroup> cells_;
  std::vector<std::size_t> need_;
  std::vector<std::size_t> capacity_;
  std::vector<std::size_t> choice_;
  std::size_t limit_;
  std::size_t nodes_ = 0;
};

using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
using FlowGraph = boost::adjacency_list<
    boost::vecS, boost::vecS, boost::directedS, boost::no_property,
    boost::property<boost::edge_capacity_t, long,
                    boost::property<boost::edge_residual_capacity_t, long,
                                    boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
using Edge = Traits::edge_descriptor;

class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t nodes) : graph_(nodes) {}

  Edge add(std::size_t from, std::size_t to, long capacity) {
    auto capacity_map = boost::get(boost::edge_capacity, graph_);
    auto reverse_map = boost::get(boost::edge_reverse, graph_);
    const Edge forward = boost::add_edge(from, to, graph_).first;
    const Edge backward = boost::add_edge(to, from, graph_).first;
    capacity_map[forward] = capacity;
    capacity_map[backward] = 0;
    reverse_map[forward] = backward;
    reverse_map[backward] = forward;
    return forward;
  }

  long max_flow(std::size_t source, std::size_t sink) {
    return boost::edmonds_karp_max_flow(graph_, source, sink);
  }

  long flow(Edge e) const {
    return boost::get(boost::edge_capacity, graph_, e) - boost::get(boost::edge_residual_capacity, graph_, e);
  }

 private:
  FlowGraph graph_;
};

}  // namespace

std::optional<std::vector<std::size_t>> solve_cell_counts(std::span<const CellGroup> cells,
                                                          std::span<const std::size_t> targets,
                                                          std::size_t node_limit) {
  CellSearch search(cells, targets, node_limit);
  if (!search.run()) return std::nullopt;
  return search.choice();
}

std::optional<std::vector<std::vector<std::size_t>>> distribute_labels(
    std::span<const LabelGroup> groups, std::span<const std::optional<std::size_t>> demands) {
  std::vector<std::size_t> targeted, free;
  for (std::size_t j = 0; j < demands.size(); ++j) (demands[j] ? targeted : free).push_back(j);

  long total = 0;
  for (const auto& g : groups) total += static_cast<long>(g.k) * static_cast<long>(g.size);
  long demanded = 0;
  for (std::size_t j : targeted) demanded += static_cast<long>(*demands[j]);
  if (demanded > total) return std::nullopt;
  if (free.empty() && demanded != total) return std::nullopt;

  // Nodes: source, sink, one per group, one per targeted annotator, one pool
  // node standing for all untargeted annotators.
  const std::size_t source = 0, sink = 1, first_group = 2;
  const std::size_t first_annotator = first_group + groups.size();
  const std::size_t pool = first_annotator + targeted.size();
  FlowNetwork net(pool + 1);

  std::vector<std::vector<Edge>> to_annotator(groups.size());
  std::vector<std::optional<Edge>> to_pool(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const long size = static_cast<long>(groups[g].size);
    net.add(source, first_group + g, groups[g].k * size);
    for (std::size_t t = 0; t < targeted.size(); ++t) to_annotator[g].push_back(net.add(first_group + g, first_annotator + t, size));
    if (!free.empty()) to_pool[g] = net.add(first_group + g, pool, static_cast<long>(free.size()) * size);
  }
  for (std::size_t t = 0; t < targeted.size(); ++t)
    net.add(first_annotator + t, sink, static_cast<long>(*demands[targeted[t]]));
  if (!free.empty()) net.add(pool, sink, total - demanded);

  if (net.max_flow(source, sink) != total) return std::nullopt;

  std::vector<std::vector<std::size_t>> out(groups.size(), std::vector<std::size_t>(demands.size(), 0));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t t = 0; t < targeted.size(); ++t)
      out[g][targeted[t]] = static_cast<std::size_t>(net.flow(to_annotator[g][t]));
    if (free.empty()) continue;
    const std::size_t shared = static_cast<std::size_t>(net.flow(*to_pool[g]));
    const std::size_t base = shared / free.size();
    const std::size_t extra = shared % free.size();
    for (std::size_t f = 0; f < free.size(); ++f) {
      // Rotate who receives the remainder so totals stay balanced across groups.
      const std::size_t slot = (f + free.size() - g % free.size()) % free.size();
      out[g][free[f]] = base + (slot < extra ? 1 : 0);
    }
  }
  return out;
}

std::vector<AnnotatorCandidate> annotator_candidates(double accuracy, double f1, double tolerance,
                                                     std::size_t positive_count, std::size_t model_positives,
                                                     std::size_t rows, std::size_t max_missing) {
  struct Scored {
    AnnotatorCandidate candidate;
    double deviation;
  };
  std::vector<Scored> found;
  const std::size_t min_evaluated = rows > max_missing ? rows - max_missing : 0;
  const std::size_t tp_max = std::min(positive_count, model_positives);
  for (std::size_t tp = 0; tp <= tp_max; ++tp) {
    const std::size_t fp = model_positives - tp;
    const std::size_t fn = positive_count - tp;
    const auto probe = analytics::report_from_counts("", "", 0.5, tp, 0, fp, fn);
    if (std::abs(probe.f1 - f1) > tolerance) continue;
    const std::size_t floor_rows = std::max(min_evaluated, tp + fp + fn);
    // Accuracy only falls as rows are removed, so scan downwards from all rows.
    for (std::size_t n = rows; n >= floor_rows && n > 0; --n) {
      const auto r = analytics::report_from_counts("", "", 0.5, tp, n - tp - fp - fn, fp, fn);
      if (r.accuracy < accuracy - tolerance) break;
      if (r.accuracy <= accuracy + tolerance) {
        found.push_back({{tp, n}, std::abs(r.accuracy - accuracy) + std::abs(r.f1 - f1)});
        break;
      }
    }
    if (rows == 0 && tp + fp + fn == 0 && std::abs(accuracy) <= tolerance) found.push_back({{tp, 0}, std::abs(f1)});
  }
  std::stable_sort(found.begin(), found.end(), [](const Scored& a, const Scored& b) {
    if (a.candidate.evaluated != b.candidate.evaluated) return a.candidate.evaluated > b.candidate.evaluated;
    return a.deviation < b.deviation;
  });
  std::vector<AnnotatorCandidate> out;
  out.reserve(found.size());
  for (const auto& s : found) out.push_back(s.candidate);
  return out;
}

}  // namespace labelvar::ingest::solver
