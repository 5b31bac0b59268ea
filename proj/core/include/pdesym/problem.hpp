#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdesym/expr.hpp"
#include "pdesym/parser.hpp"
#include "pdesym/rational.hpp"

namespace pdesym {

// A PDE N[u] = 0 with its initial condition u(x, 0) = g(x).
struct PdeProblem {
  std::string name;
  std::string unknown = "u";
  std::vector<std::string> variables{"x", "t"};
  Expr operator_lhs;
  std::vector<std::string> coefficients;
  std::string time_var = "t";
  Expr ic;
  std::map<std::string, Rational> ref_values;
  long budget = 200000;
  int max_insertions = 2;

  // Optional keys.
  std::optional<Expr> expected;
  std::vector<std::string> functions;    // empty: default function set
  std::vector<std::string> stage_order;  // empty: default staging

  std::vector<std::string> spatial_variables() const;
  ParseContext parse_context() const;
};

// Line oriented `key = value` text with `#` comments. Keys: name, unknown, pde,
// coefficients, time, ic, ref, budget, max_insertions, expected, functions,
// stage_order. Throws SchemaError, SyntaxError or SemanticError.
PdeProblem parse_problem(std::string_view text);

// parse_problem on a file; the name defaults to the file stem.
PdeProblem load_problem(const std::filesystem::path& path);

}  // namespace pdesym
