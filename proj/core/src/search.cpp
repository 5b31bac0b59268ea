#include "pdesym/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "pdesym/errors.hpp"
#include "pdesym/parser.hpp"
#include "pdesym/verify.hpp"

namespace pdesym {

bool is_unary(Function f) { return f >= Function::Exp; }

const char* name_of(Function f) {
  switch (f) {
    case Function::Add: return "add";
    case Function::Sub: return "sub";
    case Function::Mul: return "mul";
    case Function::Div: return "div";
    case Function::Pow: return "pow";
    case Function::Exp: return "exp";
    case Function::Log: return "log";
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Sqrt: return "sqrt";
  }
  return "?";
}

std::optional<Function> function_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(Function::Sqrt); ++i) {
    auto f = static_cast<Function>(i);
    if (name == name_of(f)) return f;
  }
  return std::nullopt;
}

std::vector<Function> default_functions() {
  return {Function::Add, Function::Sub, Function::Mul, Function::Div, Function::Exp};
}

const char* to_string(FailureReason r) {
  return r == FailureReason::BudgetExhausted ? "budget_exhausted" : "pool_exhausted";
}

SearchConfig SearchConfig::from_problem(const PdeProblem& problem) {
  SearchConfig cfg;
  cfg.budget = problem.budget;
  cfg.max_insertions = problem.max_insertions;
  cfg.stage_order = problem.stage_order;
  if (!problem.functions.empty()) {
    cfg.functions.clear();
    for (const auto& name : problem.functions) cfg.functions.push_back(*function_from_name(name));
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Lifting and terminals

namespace {

const std::vector<std::string> kLiftNames{"B", "C", "D", "E", "F", "G", "H", "J", "K", "L",
                                          "M", "N", "P", "Q", "R", "S", "U", "V", "W"};
const std::vector<std::string> kFreshC{"c", "k", "m", "q", "r", "s", "n", "j"};
const std::vector<std::string> kFreshP{"p", "w", "h", "g", "f", "d", "b"};

std::string first_free(const std::vector<std::string>& pool, const std::set<std::string>& taken) {
  for (const auto& n : pool)
    if (!taken.count(n)) return n;
  for (int i = 0;; ++i) {
    std::string n = pool.front() + std::string(static_cast<std::size_t>(i / 26 + 1), static_cast<char>('a' + i % 26));
    if (!taken.count(n)) return n;
  }
}

struct Lifter {
  std::set<std::string> taken;
  LiftResult out;

  Expr lift_value(const Rational& value) {
    std::string name = first_free(kLiftNames, taken);
    taken.insert(name);
    out.lifted.push_back(name);
    out.refs[name] = value;
    return Expr::param(name);
  }

  Expr walk(const Expr& e, bool additive) {
    switch (e.kind()) {
      case NodeKind::Const: return additive ? lift_value(e.value()) : e;
      case NodeKind::Unary:
        if (additive && e.unary_op() == UnaryOp::Neg && e.child().is_const()) return lift_value(-e.child().value());
        return Expr::unary(e.unary_op(), walk(e.child(), false));
      case NodeKind::Binary: {
        bool sum = e.binary_op() == BinaryOp::Add || e.binary_op() == BinaryOp::Sub;
        Expr l = walk(e.lhs(), sum);
        Expr r = walk(e.rhs(), sum);
        return Expr::binary(e.binary_op(), l, r);
      }
      default: return e;
    }
  }
};

}  // namespace

LiftResult lift_constants(const Expr& ic, const std::map<std::string, Rational>& ref, const std::set<std::string>& taken) {
  Lifter lifter;
  lifter.taken = taken;
  for (const auto& p : params_of(ic)) lifter.taken.insert(p);
  std::set<std::string> reserve = lifter.taken;
  lifter.taken.insert("A");
  lifter.out.refs = ref;
  Expr e = lifter.walk(ic, true);
  if (params_of(ic).empty() && e.kind() != NodeKind::Param) {
    lifter.taken.erase("A");
    if (reserve.count("A")) lifter.taken.insert("A");
    std::string name = lifter.taken.count("A") ? first_free(kLiftNames, lifter.taken) : "A";
    lifter.taken.insert(name);
    lifter.out.lifted.insert(lifter.out.lifted.begin(), name);
    lifter.out.refs[name] = 1;
    e = Expr::param(name) * e;
  }
  lifter.out.expr = e;
  return lifter.out;
}

std::vector<Expr> build_stage_terminals(const std::string& var, const std::vector<std::string>& coefficients,
                                        const SearchConfig& cfg, const std::string& fresh_c,
                                        const std::string& fresh_p) {
  ParseContext ctx;
  ctx.variables = {"v"};
  std::vector<Expr> out;
  auto push = [&](const Expr& e) {
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  };
  for (const auto& pattern : cfg.terminal_patterns) {
    Expr pat = parse_expr(pattern, ctx);
    std::map<std::string, Expr> base{{"v", Expr::var(var)}, {"c", Expr::param(fresh_c)}, {"p", Expr::param(fresh_p)}};
    if (contains_symbol(pat, "lambda")) {
      for (const auto& coeff : coefficients) {
        auto b = base;
        b["lambda"] = Expr::param(coeff);
        push(substitute(pat, b));
      }
    } else {
      push(substitute(pat, base));
    }
  }
  return out;
}

std::vector<CandidateSubtree> assemble_pool(const std::vector<PositionId>& positions,
                                            const std::vector<Expr>& terminals,
                                            const std::vector<Function>& functions) {
  std::vector<CandidateSubtree> pool;
  for (const auto& pos : positions) {
    for (Function f : functions) {
      if (is_unary(f)) {
        pool.push_back({pos, f, Expr(), Orientation::TerminalRight});
        continue;
      }
      for (const auto& t : terminals) {
        pool.push_back({pos, f, t, Orientation::TerminalRight});
        pool.push_back({pos, f, t, Orientation::TerminalLeft});
      }
    }
  }
  return pool;
}

// ---------------------------------------------------------------------------
// Expansion

namespace {

Expr apply_insertion(const Expr& s, const CandidateSubtree& c) {
  switch (c.op) {
    case Function::Exp: return exp(s);
    case Function::Log: return log(s);
    case Function::Sin: return sin(s);
    case Function::Cos: return cos(s);
    case Function::Sqrt: return sqrt(s);
    default: break;
  }
  static constexpr BinaryOp kOps[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Pow};
  BinaryOp op = kOps[static_cast<int>(c.op)];
  return c.orientation == Orientation::TerminalRight ? Expr::binary(op, s, c.terminal) : Expr::binary(op, c.terminal, s);
}

Expr rebuild(const Expr& e, PositionId& here, const std::map<PositionId, const CandidateSubtree*>& at) {
  Expr node = e;
  switch (e.kind()) {
    case NodeKind::Unary:
    case NodeKind::Diff: {
      here.path.push_back(Step::Only);
      Expr c = rebuild(e.child(), here, at);
      here.path.pop_back();
      if (c != e.child()) node = e.kind() == NodeKind::Unary ? Expr::unary(e.unary_op(), c) : Expr::diff(e.vars(), c);
      break;
    }
    case NodeKind::Binary: {
      here.path.push_back(Step::Left);
      Expr l = rebuild(e.lhs(), here, at);
      here.path.back() = Step::Right;
      Expr r = rebuild(e.rhs(), here, at);
      here.path.pop_back();
      if (l != e.lhs() || r != e.rhs()) node = Expr::binary(e.binary_op(), l, r);
      break;
    }
    default: break;
  }
  if (auto it = at.find(here); it != at.end()) node = apply_insertion(node, *it->second);
  return node;
}

}  // namespace

Expr expand(const Expr& current, const std::vector<CandidateSubtree>& selection) {
  if (selection.empty()) return current;
  std::map<PositionId, const CandidateSubtree*> at;
  for (const auto& c : selection) {
    subtree_at(current, c.position);
    if (!at.emplace(c.position, &c).second) throw DuplicatePosition("two insertions at " + to_string(c.position));
  }
  PositionId root;
  return rebuild(current, root, at);
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

struct Prepared {
  Expr candidate;
  std::set<std::string> fresh;
};

// Builds the candidate for one selection; a terminal reusing a fresh parameter
// already introduced by an earlier insertion gets a new name.
Prepared prepare(const StageState& state, std::vector<CandidateSubtree> sel, const std::set<std::string>& taken,
                 const std::string& fresh_c, const std::string& fresh_p) {
  Prepared out;
  std::set<std::string> used = taken;
  for (auto& c : sel) {
    if (is_unary(c.op)) continue;
    std::map<std::string, Expr> rename;
    for (const auto& [name, family] :
         {std::pair<const std::string&, const std::vector<std::string>&>{fresh_c, kFreshC}, {fresh_p, kFreshP}}) {
      if (!contains_symbol(c.terminal, name)) continue;
      std::string chosen = out.fresh.count(name) ? first_free(family, used) : name;
      if (chosen != name) rename[name] = Expr::param(chosen);
      out.fresh.insert(chosen);
      used.insert(chosen);
    }
    if (!rename.empty()) c.terminal = substitute(c.terminal, rename);
  }
  out.candidate = expand(state.current, sel);
  return out;
}

std::optional<StageAccept> evaluate(const StageState& state, const PdeProblem& problem, const SearchConfig& cfg,
                                    const Prepared& p) {
  if (!state.final_stage) {
    if (!contains_symbol(p.candidate, state.variable)) return std::nullopt;
    std::map<std::string, Rational> refs;
    if (!ic_matches(problem, p.candidate, state.lifted, &refs)) return std::nullopt;
    return StageAccept{p.candidate, {}, refs, 0};
  }
  VerifyOptions opts;
  opts.fresh = p.fresh;
  opts.fresh.insert(state.fresh_params.begin(), state.fresh_params.end());
  opts.lifted = state.lifted;
  opts.seed = cfg.seed;
  VerificationReport report = verify_candidate(problem, p.candidate, opts);
  if (report.fitness != 0) return std::nullopt;

  // End-to-end re-verification of the presented form.
  Expr final_expr = tidy(report.solution);
  VerifyOptions again;
  again.lifted = state.lifted;
  for (const auto& [k, v] : report.refs) again.lifted[k] = v;
  again.seed = cfg.seed;
  VerificationReport check = verify_candidate(problem, final_expr, again);
  if (check.fitness != 0) return std::nullopt;
  return StageAccept{final_expr, report.resolved, check.refs, 0};
}

}  // namespace

StageResult enumerate_stage(const StageState& state, const PdeProblem& problem, const SearchConfig& cfg,
                            SearchCounters& counters) {
  StageResult result;
  std::vector<CandidateSubtree> pool = assemble_pool(state.positions, state.terminals, cfg.functions);
  std::size_t n = pool.size();
  result.bound = static_cast<double>(state.positions.size()) *
                 std::log10(2.0 * static_cast<double>(cfg.functions.size()) *
                                static_cast<double>(state.terminals.size()) + 1.0);

  // next_group[i]: first pool index at a later position than pool[i].
  std::vector<std::size_t> next_group(n, n);
  for (std::size_t i = n; i-- > 0;)
    next_group[i] = (i + 1 < n && pool[i + 1].position == pool[i].position) ? next_group[i + 1] : i + 1;

  std::set<std::string> taken(problem.variables.begin(), problem.variables.end());
  taken.insert(problem.coefficients.begin(), problem.coefficients.end());
  taken.insert(problem.unknown);
  for (const auto& p : params_of(state.current)) taken.insert(p);
  for (const auto& p : params_of(problem.ic)) taken.insert(p);
  for (const auto& [k, v] : state.lifted) taken.insert(k);
  const std::string& fresh_c = state.fresh_c;
  const std::string& fresh_p = state.fresh_p;
  taken.insert(fresh_c);
  taken.insert(fresh_p);

  const std::size_t batch_size = cfg.threads > 1 ? static_cast<std::size_t>(cfg.threads) * 4 : 1;
  std::vector<std::pair<long, Prepared>> batch;
  long seq_index = 0;

  auto check_bound = [&] {
    if (result.evaluated > 0 && std::log10(static_cast<double>(result.evaluated)) > result.bound + 1e-9)
      throw std::logic_error("stage evaluated more candidates than the search-space bound");
  };

  auto flush = [&]() -> bool {
    if (batch.empty()) return false;
    std::vector<std::optional<StageAccept>> verdicts(batch.size());
    if (batch.size() == 1 || cfg.threads <= 1) {
      for (std::size_t i = 0; i < batch.size(); ++i) {
        verdicts[i] = evaluate(state, problem, cfg, batch[i].second);
        if (verdicts[i]) break;
      }
    } else {
      std::vector<std::thread> workers;
      std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), batch.size());
      for (std::size_t w = 0; w < nthreads; ++w) {
        workers.emplace_back([&, w] {
          for (std::size_t i = w; i < batch.size(); i += nthreads) verdicts[i] = evaluate(state, problem, cfg, batch[i].second);
        });
      }
      for (auto& t : workers) t.join();
    }
    // Minimum enumeration index wins; the count matches a sequential run.
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (verdicts[i]) {
        result.evaluated += static_cast<long>(i) + 1;
        counters.evaluated += static_cast<long>(i) + 1;
        result.accepted = verdicts[i];
        result.accepted->index = batch[i].first;
        batch.clear();
        check_bound();
        return true;
      }
    }
    result.evaluated += static_cast<long>(batch.size());
    counters.evaluated += static_cast<long>(batch.size());
    batch.clear();
    return false;
  };

  for (int m = 1; m <= cfg.max_insertions; ++m) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(m));
    auto fill_from = [&](std::size_t k) {
      for (std::size_t j = k; j < idx.size(); ++j) {
        idx[j] = next_group[idx[j - 1]];
        if (idx[j] >= n) return false;
      }
      return true;
    };
    if (n == 0) break;
    idx[0] = 0;
    if (!fill_from(1)) break;
    for (;;) {
      std::vector<CandidateSubtree> sel;
      for (auto i : idx) sel.push_back(pool[i]);
      Prepared p;
      bool usable = true;
      try {
        p = prepare(state, sel, taken, fresh_c, fresh_p);
      } catch (const Error&) {
        usable = false;
      }
      if (usable && static_cast<int>(p.fresh.size()) > cfg.max_fresh) usable = false;
      if (!usable) {
        ++counters.skipped;
      } else {
        if (counters.evaluated + static_cast<long>(batch.size()) >= cfg.budget) {
          if (flush()) return result;
          result.failure = StageFailure{FailureReason::BudgetExhausted, state.index, state.variable};
          return result;
        }
        batch.emplace_back(seq_index, std::move(p));
        if (batch.size() >= batch_size && flush()) return result;
      }
      ++seq_index;

      // Next combination with strictly increasing positions.
      std::size_t k = idx.size();
      bool advanced = false;
      while (k-- > 0) {
        if (idx[k] + 1 < n) {
          ++idx[k];
          if (fill_from(k + 1)) {
            advanced = true;
            break;
          }
        }
      }
      if (!advanced) break;
    }
  }
  if (flush()) return result;
  check_bound();
  result.failure = StageFailure{FailureReason::PoolExhausted, state.index, state.variable};
  return result;
}

// ---------------------------------------------------------------------------
// Solve

SolveOutcome solve(const PdeProblem& problem, const SearchConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  SolveOutcome outcome;
  SearchCounters counters;

  std::set<std::string> taken(problem.variables.begin(), problem.variables.end());
  taken.insert(problem.coefficients.begin(), problem.coefficients.end());
  taken.insert(problem.unknown);
  LiftResult lift = lift_constants(problem.ic, problem.ref_values, taken);
  std::map<std::string, Rational> lifted;
  for (const auto& name : lift.lifted) lifted[name] = lift.refs.at(name);

  std::vector<std::string> stages = cfg.stage_order;
  if (stages.empty()) {
    auto in_ic = variables_of(problem.ic);
    for (const auto& v : problem.spatial_variables())
      if (!in_ic.count(v)) stages.push_back(v);
    stages.push_back(problem.time_var);
  }

  Expr current = lift.expr;
  std::optional<StageAccept> accepted;
  std::vector<std::string> activated;
  for (const auto& v : variables_of(current)) activated.push_back(v);

  // The lifted ic may already be a solution.
  if (cfg.budget > 0) {
    VerifyOptions opts;
    opts.lifted = lifted;
    opts.seed = cfg.seed;
    ++counters.evaluated;
    VerificationReport r = verify_candidate(problem, current, opts);
    if (r.fitness == 0) accepted = StageAccept{tidy(r.solution), r.resolved, r.refs, 0};
  }

  int stage_count = 0;
  for (std::size_t k = 0; k < stages.size() && !accepted; ++k) {
    StageState state;
    state.index = static_cast<int>(k) + 1;
    state.current = current;
    state.variable = stages[k];
    activated.push_back(stages[k]);
    state.activated = activated;
    state.final_stage = k + 1 == stages.size();
    state.lifted = lifted;
    state.positions = positions(current);

    std::set<std::string> taken_here = taken;
    for (const auto& p : params_of(current)) taken_here.insert(p);
    for (const auto& p : params_of(problem.ic)) taken_here.insert(p);
    for (const auto& [name, v] : lifted) taken_here.insert(name);
    state.fresh_c = first_free(kFreshC, taken_here);
    taken_here.insert(state.fresh_c);
    state.fresh_p = first_free(kFreshP, taken_here);
    state.terminals = build_stage_terminals(stages[k], problem.coefficients, cfg, state.fresh_c, state.fresh_p);

    ++stage_count;
    StageResult res = enumerate_stage(state, problem, cfg, counters);
    if (res.failure) {
      outcome.failure = res.failure;
      break;
    }
    if (state.final_stage) {
      accepted = res.accepted;
    } else {
      current = res.accepted->expression;
      for (const auto& [name, value] : res.accepted->refs) lifted[name] = value;
    }
  }

  outcome.candidates_evaluated = counters.evaluated;
  outcome.stages = stage_count;
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  outcome.wall_time_ms = cfg.record_wall_time ? static_cast<long>(elapsed.count()) : 0;
  if (!accepted) return outcome;

  SolutionRecord rec;
  rec.name = problem.name;
  rec.expression = accepted->expression;
  rec.variables = problem.variables;
  for (const auto& p : params_of(rec.expression))
    if (std::find(problem.coefficients.begin(), problem.coefficients.end(), p) == problem.coefficients.end())
      rec.free_params.push_back(p);
  rec.resolved_params = accepted->resolved;
  auto present = params_of(rec.expression);
  for (const auto& [name, value] : accepted->refs)
    if (present.count(name)) rec.ref_values[name] = value;
  for (const auto& [name, value] : lifted)
    if (present.count(name)) rec.ref_values[name] = value;
  rec.pde_pass = true;
  rec.ic_pass = true;
  rec.candidates_evaluated = outcome.candidates_evaluated;
  rec.stages = outcome.stages;
  rec.wall_time_ms = outcome.wall_time_ms;
  outcome.record = std::move(rec);
  return outcome;
}

}  // namespace pdesym
