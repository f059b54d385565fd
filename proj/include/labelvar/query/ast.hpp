#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace labelvar::query {

enum class CompareOp { eq, ne, lt, le, gt, ge };

std::string_view to_string(CompareOp op);

// Numbers compare numerically, quoted text compares lexicographically.
using Literal = std::variant<double, std::string>;

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Compare {
  std::string column;
  CompareOp op;
  Literal literal;
};

struct In {
  std::string column;
  std::vector<Literal> values;
};

struct Not {
  NodePtr child;
};

// And/Or always hold at least two children; the parser flattens chains of the
// same operator into one node.
struct And {
  std::vector<NodePtr> children;
};

struct Or {
  std::vector<NodePtr> children;
};

struct Node {
  std::variant<Compare, In, Not, And, Or> value;
};

// Immutable filter expression. Cheap to copy; subtrees are shared.
class Query {
 public:
  explicit Query(NodePtr root);

  static Query compare(std::string column, CompareOp op, Literal literal);
  static Query in(std::string column, std::vector<Literal> values);
  static Query negate(Query child);
  static Query all_of(std::vector<Query> children);
  static Query any_of(std::vector<Query> children);

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }

  // Structural equality.
  friend bool operator==(const Query& a, const Query& b);

 private:
  NodePtr root_;
};

bool structurally_equal(const Node& a, const Node& b);

// Fully parenthesised canonical text; parse(print(q)) == q.
std::string print(const Query& query);
std::string print_literal(const Literal& literal);

std::vector<std::string> referenced_columns(const Query& query);

}  // namespace labelvar::query
