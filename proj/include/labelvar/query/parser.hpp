#pragma once

#include <string_view>

#include "labelvar/query/ast.hpp"

namespace labelvar::query {

// Grammar (keywords case-insensitive, precedence not > and > or):
//
//   query := or
//   or    := and ("or" and)*
//   and   := unary ("and" unary)*
//   unary := "not" unary | "(" query ")" | comp
//   comp  := ident (cmpop literal | "in" "[" literal ("," literal)* "]")
//
// Throws SyntaxError with the byte offset of the offending token and the set of
// tokens that would have been accepted there.
Query parse(std::string_view text);

}  // namespace labelvar::query
