#include "pdesym/calculus.hpp"

#include <map>
#include <vector>

#include "pdesym/errors.hpp"
#include "pdesym/problem.hpp"

namespace pdesym {

using cas::RatFunc;

Expr differentiate(const Expr& e, const std::string& var) {
  if (contains_deriv(e)) throw UnsupportedFunction("cannot differentiate an expression holding derivative atoms");
  return cas::to_expr(cas::differentiate(cas::canonicalize(e), var));
}

namespace {

// Derivatives of the candidate keyed by the sorted variable list.
class DerivativeTable {
 public:
  explicit DerivativeTable(RatFunc base) { table_[{}] = std::move(base); }

  const RatFunc& get(const std::vector<std::string>& vars) {
    auto it = table_.find(vars);
    if (it != table_.end()) return it->second;
    std::vector<std::string> prefix(vars.begin(), vars.end() - 1);
    RatFunc d = cas::differentiate(get(prefix), vars.back());
    return table_.emplace(vars, std::move(d)).first->second;
  }

 private:
  std::map<std::vector<std::string>, RatFunc> table_;
};

void check_unknown(const Expr& e, const std::string& unknown) {
  if (e.name() != unknown) throw UnsupportedFunction("derivative of '" + e.name() + "' but the unknown is '" + unknown + "'");
}

RatFunc evaluate(const Expr& e, DerivativeTable& table, const std::string& unknown) {
  switch (e.kind()) {
    case NodeKind::Deriv: check_unknown(e, unknown); return table.get(e.vars());
    case NodeKind::Diff: {
      RatFunc r = evaluate(e.child(), table, unknown);
      for (const auto& v : e.vars()) r = cas::differentiate(r, v);
      return r;
    }
    case NodeKind::Unary: return cas::apply_unary(e.unary_op(), evaluate(e.child(), table, unknown));
    case NodeKind::Binary:
      return cas::apply_binary(e.binary_op(), evaluate(e.lhs(), table, unknown), evaluate(e.rhs(), table, unknown));
    default: return cas::canonicalize(e);
  }
}

Expr substitute_impl(const Expr& e, DerivativeTable& table, const std::string& unknown) {
  switch (e.kind()) {
    case NodeKind::Deriv: check_unknown(e, unknown); return cas::to_expr(table.get(e.vars()));
    case NodeKind::Diff: {
      RatFunc r = evaluate(e.child(), table, unknown);
      for (const auto& v : e.vars()) r = cas::differentiate(r, v);
      return cas::to_expr(r);
    }
    case NodeKind::Unary: return Expr::unary(e.unary_op(), substitute_impl(e.child(), table, unknown));
    case NodeKind::Binary:
      return Expr::binary(e.binary_op(), substitute_impl(e.lhs(), table, unknown),
                          substitute_impl(e.rhs(), table, unknown));
    default: return e;
  }
}

DerivativeTable table_for(const Expr& candidate) {
  if (contains_deriv(candidate)) throw UnsupportedFunction("candidate holds derivative atoms");
  return DerivativeTable(cas::canonicalize(candidate));
}

}  // namespace

Expr substitute_unknown(const Expr& op, const Expr& candidate, const std::string& unknown) {
  DerivativeTable table = table_for(candidate);
  return substitute_impl(op, table, unknown);
}

RatFunc residual_form(const Expr& op, const Expr& candidate, const std::string& unknown) {
  DerivativeTable table = table_for(candidate);
  return evaluate(op, table, unknown);
}

Expr residual(const PdeProblem& problem, const Expr& candidate) {
  return cas::to_expr(residual_form(problem.operator_lhs, candidate, problem.unknown));
}

}  // namespace pdesym
