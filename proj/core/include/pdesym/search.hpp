#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pdesym/expr.hpp"
#include "pdesym/problem.hpp"
#include "pdesym/simplify.hpp"
#include "pdesym/solution.hpp"

namespace pdesym {

enum class Function : std::uint8_t { Add, Sub, Mul, Div, Pow, Exp, Log, Sin, Cos, Sqrt };

bool is_unary(Function f);
const char* name_of(Function f);
std::optional<Function> function_from_name(const std::string& name);

// {add, sub, mul, div, exp}
std::vector<Function> default_functions();

enum class Orientation : std::uint8_t { TerminalRight, TerminalLeft };

// One insertion: the node at `position` becomes op(node, terminal) or
// op(terminal, node); unary functions wrap the node and ignore the terminal.
struct CandidateSubtree {
  PositionId position;
  Function op = Function::Add;
  Expr terminal;
  Orientation orientation = Orientation::TerminalRight;
};

struct SearchConfig {
  std::vector<Function> functions = default_functions();
  // Terminal patterns over the placeholder variable `v`; `c` and `p` stand for fresh
  // parameters and `lambda` expands to each coefficient of the problem.
  std::vector<std::string> terminal_patterns{"v", "c*v", "lambda*v", "v^2", "c*v^2", "p + v"};
  long budget = 200000;
  int max_insertions = 2;
  std::vector<std::string> stage_order;  // empty: default staging
  std::uint64_t seed = 1;
  int threads = 1;
  int max_fresh = 2;
  bool record_wall_time = true;

  // Budget, insertion count, functions and stage order taken from the problem file.
  static SearchConfig from_problem(const PdeProblem& problem);
};

struct LiftResult {
  Expr expr;
  std::vector<std::string> lifted;
  std::map<std::string, Rational> refs;
};

// Replaces additive and standalone numeric constants of the ic by parameters
// carrying the constant as reference value, then applies a unit lift A*ic (A:1)
// unless the ic already has parameters or has become a bare parameter.
// `taken` lists names that must not be reused.
LiftResult lift_constants(const Expr& ic, const std::map<std::string, Rational>& ref,
                          const std::set<std::string>& taken = {});

// Instantiates the terminal patterns for `var`, deduplicated.
std::vector<Expr> build_stage_terminals(const std::string& var, const std::vector<std::string>& coefficients,
                                        const SearchConfig& cfg, const std::string& fresh_c = "c",
                                        const std::string& fresh_p = "p");

// Deterministic pool: position preorder, then function order, then terminal order,
// then orientation (terminal-right first). Unary functions contribute one wrap per
// position.
std::vector<CandidateSubtree> assemble_pool(const std::vector<PositionId>& positions,
                                            const std::vector<Expr>& terminals, const std::vector<Function>& functions);

// Applies insertions at distinct positions of `current`; positions refer to the
// original tree. Throws InvalidPosition / DuplicatePosition.
Expr expand(const Expr& current, const std::vector<CandidateSubtree>& selection);

struct StageState {
  int index = 0;
  Expr current;
  std::vector<std::string> activated;
  std::string variable;
  std::vector<Expr> terminals;
  std::vector<PositionId> positions;
  std::string fresh_c = "c";  // fresh parameter names used by the terminals
  std::string fresh_p = "p";
  std::set<std::string> fresh_params;
  std::map<std::string, Rational> lifted;
  bool final_stage = true;
};

enum class FailureReason : std::uint8_t { BudgetExhausted, PoolExhausted };
const char* to_string(FailureReason r);

struct StageFailure {
  FailureReason reason = FailureReason::PoolExhausted;
  int stage = 0;
  std::string variable;
};

struct SearchCounters {
  long evaluated = 0;
  long skipped = 0;
};

struct StageAccept {
  Expr expression;       // resolved parameters substituted
  Assignment resolved;
  std::map<std::string, Rational> refs;
  long index = 0;        // enumeration index of the accepted selection
};

struct StageResult {
  std::optional<StageAccept> accepted;
  std::optional<StageFailure> failure;
  long evaluated = 0;  // candidates evaluated in this stage
  double bound = 0;    // log10 of (2|F||T|+1)^|P|
};

StageResult enumerate_stage(const StageState& state, const PdeProblem& problem, const SearchConfig& cfg,
                            SearchCounters& counters);

struct SolveOutcome {
  std::optional<SolutionRecord> record;
  std::optional<StageFailure> failure;
  long candidates_evaluated = 0;
  int stages = 0;
  long wall_time_ms = 0;
};

SolveOutcome solve(const PdeProblem& problem, const SearchConfig& cfg);

}  // namespace pdesym
