#pragma once

#include <ostream>
#include <string>

#include "pdesym/expr.hpp"

namespace pdesym {

// Infix text in the expression grammar, e.g. "exp(x + a*t)". Parenthesizes exactly
// where needed for parse_expr to rebuild the same tree (up to fold_constants).
std::string format(const Expr& e);

// Prefix s-expression, e.g. "(exp (+ x (* a t)))". Constants print as "p" or "p/q".
std::string format_sexp(const Expr& e);

// Writes format(e).
std::ostream& operator<<(std::ostream& os, const Expr& e);

}  // namespace pdesym
