#pragma once

#include <string>
#include <string_view>

#include "labelvar/core/dataset.hpp"
#include "labelvar/core/selection.hpp"
#include "labelvar/query/ast.hpp"

namespace labelvar::query {

// Rows satisfying the query, in dataset order. A comparison touching a missing
// cell, or comparing a number with text, is false; Not negates that boolean.
// Every referenced column is checked up front (UnknownColumnError).
SelectionSet evaluate(const Query& query, const Dataset& dataset, std::string provenance);
SelectionSet evaluate(const Query& query, const Dataset& dataset);

// parse + evaluate, with the source text as provenance.
SelectionSet select(std::string_view text, const Dataset& dataset);

// Three-valued-to-boolean comparison of one cell, shared with tests.
bool compare_cell(const Cell& cell, CompareOp op, const Literal& literal);

}  // namespace labelvar::query
