#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pdesym/expr.hpp"
#include "pdesym/rational.hpp"

namespace pdesym {

struct SolutionRecord {
  std::string name;
  Expr expression;
  std::vector<std::string> variables;
  std::vector<std::string> free_params;
  std::map<std::string, Expr> resolved_params;
  std::map<std::string, Rational> ref_values;
  bool pde_pass = false;
  bool ic_pass = false;
  long candidates_evaluated = 0;
  int stages = 0;
  long wall_time_ms = 0;

  friend bool operator==(const SolutionRecord&, const SolutionRecord&) = default;
};

// JSON exchange format. The expression is written twice: "expression_text" in the
// infix grammar and "expression_sexp" as a prefix s-expression; rationals are "p/q"
// strings.
std::string export_solution(const SolutionRecord& rec);

// Reads the expression from "expression_sexp". Throws SchemaError on malformed input.
SolutionRecord import_solution(std::string_view json_text);

}  // namespace pdesym
