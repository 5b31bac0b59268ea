#pragma once

#include <string>

#include "pdesym/canonical.hpp"
#include "pdesym/expr.hpp"

namespace pdesym {

struct PdeProblem;

// Exact partial derivative, returned simplified. Throws UnsupportedFunction when `e`
// contains derivative atoms or group derivatives.
Expr differentiate(const Expr& e, const std::string& var);

// Replaces every derivative atom of the unknown in `op` by the matching derivative of
// `candidate` and resolves group derivatives Dxx(...). The arithmetic of `op` is kept
// as written, so the result is generally not simplified.
Expr substitute_unknown(const Expr& op, const Expr& candidate, const std::string& unknown = "u");

// Canonical form of op[candidate]; all coefficients and parameters stay symbolic.
cas::RatFunc residual_form(const Expr& op, const Expr& candidate, const std::string& unknown = "u");

Expr residual(const PdeProblem& problem, const Expr& candidate);

}  // namespace pdesym
