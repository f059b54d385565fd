#include "labelvar/query/ast.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "labelvar/core/errors.hpp"

namespace labelvar::query {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_literal(const Literal& literal) {
  if (const double* d = std::get_if<double>(&literal); d && !std::isfinite(*d))
    throw SchemaError("query literals must be finite numbers");
}

void check_column(const std::string& column) {
  if (column.empty()) throw SchemaError("query comparison without a column");
}

bool children_equal(const std::vector<NodePtr>& a, const std::vector<NodePtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!structurally_equal(*a[i], *b[i])) return false;
  }
  return true;
}

void print_node(const Node& node, std::string& out);

void print_list(const std::vector<NodePtr>& children, std::string_view keyword, std::string& out) {
  out += '(';
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (i) {
      out += ' ';
      out += keyword;
      out += ' ';
    }
    print_node(*children[i], out);
  }
  out += ')';
}

void print_node(const Node& node, std::string& out) {
  std::visit(overloaded{
                 [&](const Compare& c) {
                   out += '(' + c.column + ' ' + std::string(to_string(c.op)) + ' ' + print_literal(c.literal) + ')';
                 },
                 [&](const In& in) {
                   out += '(' + in.column + " in [";
                   for (std::size_t i = 0; i < in.values.size(); ++i) {
                     if (i) out += ", ";
                     out += print_literal(in.values[i]);
                   }
                   out += "])";
                 },
                 [&](const Not& n) {
                   out += "(not ";
                   print_node(*n.child, out);
                   out += ')';
                 },
                 [&](const And& a) { print_list(a.children, "and", out); },
                 [&](const Or& o) { print_list(o.children, "or", out); },
             },
             node.value);
}

void collect_columns(const Node& node, std::vector<std::string>& out) {
  auto add = [&](const std::string& c) {
    for (const auto& existing : out) {
      if (existing == c) return;
    }
    out.push_back(c);
  };
  std::visit(overloaded{
                 [&](const Compare& c) { add(c.column); },
                 [&](const In& in) { add(in.column); },
                 [&](const Not& n) { collect_columns(*n.child, out); },
                 [&](const And& a) {
                   for (const auto& c : a.children) collect_columns(*c, out);
                 },
                 [&](const Or& o) {
                   for (const auto& c : o.children) collect_columns(*c, out);
                 },
             },
             node.value);
}

std::vector<NodePtr> roots(std::vector<Query> children, const char* what) {
  if (children.size() < 2) throw SchemaError(std::string(what) + " needs at least two operands");
  std::vector<NodePtr> out;
  out.reserve(children.size());
  for (auto& c : children) out.push_back(c.root_ptr());
  return out;
}

}  // namespace

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::eq: return "==";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "==";
}

Query::Query(NodePtr root) : root_(std::move(root)) {
  if (!root_) throw SchemaError("empty query node");
}

Query Query::compare(std::string column, CompareOp op, Literal literal) {
  check_column(column);
  check_literal(literal);
  return Query(std::make_shared<const Node>(Node{Compare{std::move(column), op, std::move(literal)}}));
}

Query Query::in(std::string column, std::vector<Literal> values) {
  check_column(column);
  if (values.empty()) throw SchemaError("'in' needs at least one value");
  for (const auto& v : values) check_literal(v);
  return Query(std::make_shared<const Node>(Node{In{std::move(column), std::move(values)}}));
}

Query Query::negate(Query child) { return Query(std::make_shared<const Node>(Node{Not{child.root_ptr()}})); }

Query Query::all_of(std::vector<Query> children) {
  return Query(std::make_shared<const Node>(Node{And{roots(std::move(children), "and")}}));
}

Query Query::any_of(std::vector<Query> children) {
  return Query(std::make_shared<const Node>(Node{Or{roots(std::move(children), "or")}}));
}

bool operator==(const Query& a, const Query& b) { return structurally_equal(*a.root_, *b.root_); }

bool structurally_equal(const Node& a, const Node& b) {
  if (a.value.index() != b.value.index()) return false;
  return std::visit(overloaded{
                        [&](const Compare& x) {
                          const auto& y = std::get<Compare>(b.value);
                          return x.column == y.column && x.op == y.op && x.literal == y.literal;
                        },
                        [&](const In& x) {
                          const auto& y = std::get<In>(b.value);
                          return x.column == y.column && x.values == y.values;
                        },
                        [&](const Not& x) { return structurally_equal(*x.child, *std::get<Not>(b.value).child); },
                        [&](const And& x) { return children_equal(x.children, std::get<And>(b.value).children); },
                        [&](const Or& x) { return children_equal(x.children, std::get<Or>(b.value).children); },
                    },
                    a.value);
}

std::string print_literal(const Literal& literal) {
  if (const double* d = std::get_if<double>(&literal)) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), *d);
    return std::string(buf.data(), end);
  }
  std::string out = "\"";
  for (char c : std::get<std::string>(literal)) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string print(const Query& query) {
  std::string out;
  print_node(query.root(), out);
  return out;
}

std::vector<std::string> referenced_columns(const Query& query) {
  std::vector<std::string> out;
  collect_columns(query.root(), out);
  return out;
}

}  // namespace labelvar::query
