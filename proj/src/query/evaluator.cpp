#include "labelvar/query/evaluator.hpp"

#include "labelvar/query/parser.hpp"

namespace labelvar::query {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <class T>
bool apply(const T& a, CompareOp op, const T& b) {
  switch (op) {
    case CompareOp::eq: return a == b;
    case CompareOp::ne: return a != b;
    case CompareOp::lt: return a < b;
    case CompareOp::le: return a <= b;
    case CompareOp::gt: return a > b;
    case CompareOp::ge: return a >= b;
  }
  return false;
}

using Mask = std::vector<char>;

class MaskEvaluator {
 public:
  explicit MaskEvaluator(const Dataset& d) : d_(d) {}

  Mask eval(const Node& node) const {
    return std::visit(overloaded{
                          [&](const Compare& c) { return compare(c); },
                          [&](const In& in) { return membership(in); },
                          [&](const Not& n) {
                            Mask m = eval(*n.child);
                            for (char& v : m) v = !v;
                            return m;
                          },
                          [&](const And& a) {
                            Mask m = eval(*a.children.front());
                            for (std::size_t i = 1; i < a.children.size(); ++i) {
                              const Mask other = eval(*a.children[i]);
                              for (std::size_t r = 0; r < m.size(); ++r) m[r] = m[r] && other[r];
                            }
                            return m;
                          },
                          [&](const Or& o) {
                            Mask m = eval(*o.children.front());
                            for (std::size_t i = 1; i < o.children.size(); ++i) {
                              const Mask other = eval(*o.children[i]);
                              for (std::size_t r = 0; r < m.size(); ++r) m[r] = m[r] || other[r];
                            }
                            return m;
                          },
                      },
                      node.value);
  }

 private:
  Mask compare(const Compare& c) const {
    const auto values = d_.values(c.column);
    Mask m(values.size(), 0);
    for (std::size_t r = 0; r < values.size(); ++r) m[r] = compare_cell(values[r], c.op, c.literal);
    return m;
  }

  Mask membership(const In& in) const {
    const auto values = d_.values(in.column);
    Mask m(values.size(), 0);
    for (std::size_t r = 0; r < values.size(); ++r) {
      for (const auto& lit : in.values) {
        if (compare_cell(values[r], CompareOp::eq, lit)) {
          m[r] = 1;
          break;
        }
      }
    }
    return m;
  }

  const Dataset& d_;
};

}  // namespace

bool compare_cell(const Cell& cell, CompareOp op, const Literal& literal) {
  if (const double* v = number_if(cell)) {
    const double* lit = std::get_if<double>(&literal);
    return lit && apply(*v, op, *lit);
  }
  if (const auto* s = std::get_if<std::string>(&cell)) {
    const auto* lit = std::get_if<std::string>(&literal);
    return lit && apply(*s, op, *lit);
  }
  return false;
}

SelectionSet evaluate(const Query& query, const Dataset& dataset, std::string provenance) {
  for (const auto& column : referenced_columns(query)) dataset.column_index(column);
  const Mask mask = MaskEvaluator(dataset).eval(query.root());
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < mask.size(); ++r) {
    if (mask[r]) rows.push_back(r);
  }
  return SelectionSet(dataset.row_space(), std::move(rows), std::move(provenance));
}

SelectionSet evaluate(const Query& query, const Dataset& dataset) { return evaluate(query, dataset, print(query)); }

SelectionSet select(std::string_view text, const Dataset& dataset) {
  return evaluate(parse(text), dataset, std::string(text));
}

}  // namespace labelvar::query
