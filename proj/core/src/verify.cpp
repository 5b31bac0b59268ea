#include "pdesym/verify.hpp"

#include <algorithm>
#include <random>

#include "pdesym/calculus.hpp"
#include "pdesym/errors.hpp"

namespace pdesym {

namespace {

bool is_zero_form(const Expr& e) {
  try {
    return cas::canonicalize(e).is_zero();
  } catch (const Error&) {
    return false;
  }
}

std::map<std::string, Expr> as_bindings(const std::map<std::string, Rational>& values) {
  std::map<std::string, Expr> out;
  for (const auto& [k, v] : values) out[k] = Expr::constant(v);
  return out;
}

// Values tried for a free parameter during the ic check.
std::vector<Rational> trial_values(const PdeProblem& problem, const std::string& name) {
  std::vector<Rational> out;
  if (auto it = problem.ref_values.find(name); it != problem.ref_values.end()) out.push_back(it->second);
  for (const Rational& q : {Rational(1), Rational(0), Rational(-1), Rational(2), Rational(-2), Rational(1, 2),
                            Rational(-1, 2)}) {
    if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
  }
  return out;
}

}  // namespace

bool ic_matches(const PdeProblem& problem, const Expr& candidate, const std::map<std::string, Rational>& fixed,
                std::map<std::string, Rational>* refs) {
  Expr at0 = substitute(candidate, {{problem.time_var, Expr::constant(0)}});
  Expr diff = at0 - problem.ic;

  std::map<std::string, Rational> used;
  std::vector<std::string> free;
  for (const auto& name : params_of(diff)) {
    if (std::find(problem.coefficients.begin(), problem.coefficients.end(), name) != problem.coefficients.end())
      continue;
    if (auto it = fixed.find(name); it != fixed.end()) {
      used[name] = it->second;
    } else {
      free.push_back(name);
    }
  }
  Expr base = substitute(diff, as_bindings(used));
  if (is_zero_form(base)) {
    if (refs) *refs = used;
    return true;
  }
  if (free.empty()) return false;

  // Small search over reference values; beyond three free parameters only the
  // first few values are tried.
  std::vector<std::vector<Rational>> values;
  for (const auto& name : free) {
    auto v = trial_values(problem, name);
    if (free.size() > 3) v.resize(std::min<std::size_t>(v.size(), 2));
    values.push_back(std::move(v));
  }
  std::vector<std::size_t> idx(free.size(), 0);
  for (;;) {
    std::map<std::string, Rational> trial;
    for (std::size_t i = 0; i < free.size(); ++i) trial[free[i]] = values[i][idx[i]];
    if (is_zero_form(substitute(base, as_bindings(trial)))) {
      if (refs) {
        *refs = used;
        refs->insert(trial.begin(), trial.end());
      }
      return true;
    }
    std::size_t k = free.size();
    while (k > 0) {
      --k;
      if (++idx[k] < values[k].size()) break;
      idx[k] = 0;
      if (k == 0) return false;
    }
  }
}

VerificationReport verify_candidate(const PdeProblem& problem, const Expr& candidate, const VerifyOptions& opts) {
  VerificationReport report;
  report.solution = candidate;
  cas::RatFunc r;
  try {
    r = residual_form(problem.operator_lhs, candidate, problem.unknown);
  } catch (const Error&) {
    // No canonical form; the residual can still be rejected numerically.
    try {
      report.residual_simplified = substitute_unknown(problem.operator_lhs, candidate, problem.unknown);
      report.pde_verdict = numeric_witness(report.residual_simplified, opts.seed);
    } catch (const Error&) {
      report.residual_simplified = problem.operator_lhs;
    }
    return report;
  }
  report.residual_simplified = cas::to_expr(r);

  auto accept_if_ic = [&](const Expr& solution, const Assignment& resolved) {
    std::map<std::string, Rational> refs;
    if (!ic_matches(problem, solution, opts.lifted, &refs)) return false;
    report.pde_verdict = ZeroVerdict{ZeroKind::CertifiedZero, {}, 0.0};
    report.residual_simplified = Expr::constant(0);
    report.ic_pass = true;
    report.resolved = resolved;
    report.refs = std::move(refs);
    report.solution = solution;
    report.fitness = 0;
    return true;
  };

  if (r.is_zero()) {
    report.pde_verdict = ZeroVerdict{ZeroKind::CertifiedZero, {}, 0.0};
    accept_if_ic(candidate, {});
    return report;
  }
  report.pde_verdict = numeric_witness(report.residual_simplified, opts.seed);

  std::set<std::string> present = cas::symbols_of(r);
  std::vector<std::string> tier1;
  for (const auto& f : opts.fresh)
    if (present.count(f)) tier1.push_back(f);
  std::vector<std::string> tier2 = tier1;
  for (const auto& [name, value] : opts.lifted)
    if (present.count(name)) tier2.push_back(name);

  std::optional<std::pair<Expr, Assignment>> pde_only;
  for (const auto* unknowns : {&tier1, &tier2}) {
    if (unknowns->empty() || (unknowns == &tier2 && tier2.size() == tier1.size())) continue;
    for (const auto& sol : solve_identically_zero(r, *unknowns, {}, opts.limits)) {
      Expr solution = substitute(candidate, sol);
      try {
        if (!residual_form(problem.operator_lhs, solution, problem.unknown).is_zero()) continue;
      } catch (const Error&) {
        continue;
      }
      if (accept_if_ic(solution, sol)) return report;
      if (!pde_only) pde_only = std::make_pair(solution, sol);
    }
  }
  if (pde_only) {
    // The residual can be made to vanish but never together with the ic.
    report.pde_verdict = ZeroVerdict{ZeroKind::CertifiedZero, {}, 0.0};
    report.residual_simplified = Expr::constant(0);
    report.solution = pde_only->first;
    report.resolved = pde_only->second;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Equivalence

const char* to_string(Equivalence e) {
  switch (e) {
    case Equivalence::Equivalent: return "Equivalent";
    case Equivalence::Distinct: return "Distinct";
    case Equivalence::Undecided: return "Undecided";
  }
  return "?";
}

namespace {

std::vector<std::string> family_params(const Expr& e, const PdeProblem& problem) {
  std::vector<std::string> out;
  for (const auto& p : params_of(e))
    if (std::find(problem.coefficients.begin(), problem.coefficients.end(), p) == problem.coefficients.end())
      out.push_back(p);
  return out;
}

// Tries b = a under params(b) -> affine forms in params(a).
Equivalence one_direction(const Expr& a, const Expr& b, const PdeProblem& problem, std::uint64_t seed) {
  auto pa = family_params(a, problem);
  auto pb = family_params(b, problem);

  std::vector<std::string> unknowns;
  std::map<std::string, Expr> map;
  std::vector<std::pair<std::string, std::vector<std::string>>> layout;  // b param -> its coefficient names
  for (const auto& q : pb) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j <= pa.size(); ++j) {
      names.push_back("__m" + std::to_string(unknowns.size()));
      unknowns.push_back(names.back());
    }
    Expr form = Expr::param(names[0]);
    for (std::size_t j = 0; j < pa.size(); ++j) form = form + Expr::param(names[j + 1]) * Expr::param(pa[j]);
    map[q] = form;
    layout.emplace_back(q, names);
  }
  Expr diff = a - substitute(b, map);

  cas::RatFunc r;
  try {
    r = cas::canonicalize(diff);
  } catch (const Error&) {
    return Equivalence::Undecided;
  }
  if (r.is_zero()) return Equivalence::Equivalent;

  SolveLimits limits;
  limits.max_unknowns = std::max<std::size_t>(unknowns.size(), 1);
  limits.max_solutions = 4;
  limits.max_steps = 1024;
  std::set<std::string> basis(pa.begin(), pa.end());
  for (auto sol : solve_identically_zero(r, unknowns, basis, limits)) {
    // Unconstrained map coefficients are set to zero.
    std::map<std::string, Expr> zeros;
    for (const auto& u : unknowns)
      if (!sol.count(u)) zeros[u] = Expr::constant(0);
    for (auto& [k, v] : sol) v = substitute(v, zeros);
    sol.insert(zeros.begin(), zeros.end());
    if (is_zero_form(substitute(diff, sol))) return Equivalence::Equivalent;
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coeff(-2, 2);
  for (int trial = 0; trial < 32; ++trial) {
    std::map<std::string, Expr> sample;
    for (const auto& u : unknowns) sample[u] = Expr::constant(coeff(rng));
    Expr d = substitute(diff, sample);
    if (is_zero_form(d)) return Equivalence::Equivalent;
    if (numeric_witness(d, seed + static_cast<std::uint64_t>(trial) + 1).kind != ZeroKind::WitnessNonzero)
      return Equivalence::Undecided;
  }
  return Equivalence::Distinct;
}

}  // namespace

Equivalence check_equivalence(const Expr& a, const Expr& b, const PdeProblem& problem, std::uint64_t seed) {
  Equivalence ab = one_direction(a, b, problem, seed);
  if (ab == Equivalence::Equivalent) return ab;
  Equivalence ba = one_direction(b, a, problem, seed);
  if (ba == Equivalence::Equivalent) return ba;
  if (ab == Equivalence::Distinct && ba == Equivalence::Distinct) return Equivalence::Distinct;
  return Equivalence::Undecided;
}

}  // namespace pdesym
