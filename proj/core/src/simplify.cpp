#include "pdesym/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pdesym/errors.hpp"

namespace pdesym {

using cas::Gen;
using cas::GenKind;
using cas::Monomial;
using cas::Poly;
using cas::RatFunc;
using cas::Term;

Expr simplify(const Expr& e) {
  try {
    return cas::to_expr(cas::canonicalize(e));
  } catch (const Error&) {
    return fold_constants(e);
  }
}

const char* to_string(ZeroKind k) {
  switch (k) {
    case ZeroKind::CertifiedZero: return "CertifiedZero";
    case ZeroKind::WitnessNonzero: return "WitnessNonzero";
    case ZeroKind::Undecided: return "Undecided";
  }
  return "?";
}

namespace {

constexpr double kWitnessThreshold = 1e-6;
constexpr double kSingularGuard = 1e-9;

// Like eval_numeric, but also rejects points that come close to a singularity.
std::optional<double> eval_guarded(const Expr& e, const std::map<std::string, double>& b) {
  switch (e.kind()) {
    case NodeKind::Const: return to_double(e.value());
    case NodeKind::Var:
    case NodeKind::Param: {
      auto it = b.find(e.name());
      if (it == b.end()) return std::nullopt;
      return it->second;
    }
    case NodeKind::Deriv:
    case NodeKind::Diff: return std::nullopt;
    case NodeKind::Unary: {
      auto c = eval_guarded(e.child(), b);
      if (!c) return std::nullopt;
      double v = *c;
      switch (e.unary_op()) {
        case UnaryOp::Neg: return -v;
        case UnaryOp::Exp: v = std::exp(v); break;
        case UnaryOp::Log:
          if (v < kSingularGuard) return std::nullopt;
          v = std::log(v);
          break;
        case UnaryOp::Sin: v = std::sin(v); break;
        case UnaryOp::Cos: v = std::cos(v); break;
        case UnaryOp::Sqrt:
          if (v < 0) return std::nullopt;
          v = std::sqrt(v);
          break;
      }
      if (!std::isfinite(v)) return std::nullopt;
      return v;
    }
    case NodeKind::Binary: {
      auto l = eval_guarded(e.lhs(), b);
      if (!l) return std::nullopt;
      auto r = eval_guarded(e.rhs(), b);
      if (!r) return std::nullopt;
      double v = 0;
      switch (e.binary_op()) {
        case BinaryOp::Add: v = *l + *r; break;
        case BinaryOp::Sub: v = *l - *r; break;
        case BinaryOp::Mul: v = *l * *r; break;
        case BinaryOp::Div:
          if (std::abs(*r) < kSingularGuard) return std::nullopt;
          v = *l / *r;
          break;
        case BinaryOp::Pow:
          if (*l < 0 && std::floor(*r) != *r) return std::nullopt;
          if (std::abs(*l) < kSingularGuard && *r < 0) return std::nullopt;
          v = std::pow(*l, *r);
          break;
      }
      if (!std::isfinite(v)) return std::nullopt;
      return v;
    }
  }
  return std::nullopt;
}

}  // namespace

ZeroVerdict numeric_witness(const Expr& e, std::uint64_t seed, int points) {
  std::set<std::string> names = variables_of(e);
  for (const auto& p : params_of(e)) names.insert(p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.3, 2.7);
  std::bernoulli_distribution neg(0.5);
  ZeroVerdict out;
  for (int i = 0; i < points; ++i) {
    std::map<std::string, double> point;
    for (const auto& n : names) point[n] = neg(rng) ? -mag(rng) : mag(rng);
    auto v = eval_guarded(e, point);
    if (v && std::abs(*v) > kWitnessThreshold) {
      out.kind = ZeroKind::WitnessNonzero;
      out.point = std::move(point);
      out.value = *v;
      return out;
    }
  }
  return out;
}

ZeroVerdict zero_certificate(const Expr& e, std::uint64_t seed) {
  try {
    if (cas::canonicalize(e).is_zero()) return ZeroVerdict{ZeroKind::CertifiedZero, {}, 0.0};
  } catch (const Error&) {
    // not canonicalizable; only a numeric witness can say anything
  }
  return numeric_witness(e, seed);
}

// ---------------------------------------------------------------------------
// Undetermined coefficients

namespace {

bool is_unknown(const Gen& g, const std::set<std::string>& unknowns) {
  return g->kind == GenKind::Symbol && unknowns.count(g->symbol) > 0;
}

class Classifier {
 public:
  Classifier(const std::set<std::string>& unknowns, const std::set<std::string>& basis)
      : unknowns_(unknowns), basis_(basis) {}

  // Basis generators index the equations; the rest live in the coefficients.
  bool is_basis(const Gen& g) const {
    if (g->kind == GenKind::Symbol) return g->is_variable || basis_.count(g->symbol) > 0;
    if (g->arg) return depends(g->arg->num) || depends(g->arg->den);
    if (g->exp_arg) return depends(*g->exp_arg);
    return true;
  }

 private:
  bool depends(const Poly& p) const {
    for (const auto& t : p.terms()) {
      for (const auto& [g, k] : t.mono.factors) {
        if (is_unknown(g, unknowns_) || is_basis(g)) return true;
      }
      if (t.mono.exp && depends(*t.mono.exp)) return true;
    }
    return false;
  }

  const std::set<std::string>& unknowns_;
  const std::set<std::string>& basis_;
};

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return cas::compare(a, b) < 0; }
};

std::vector<Poly> coefficient_equations(const Poly& num, const Classifier& cls) {
  std::map<Monomial, std::vector<Term>, MonomialLess> groups;
  for (const auto& t : num.terms()) {
    Monomial key;
    key.exp = t.mono.exp;
    Term coeff{Monomial{}, t.coeff};
    for (const auto& f : t.mono.factors) {
      if (cls.is_basis(f.first)) {
        key.factors.push_back(f);
      } else {
        coeff.mono.factors.push_back(f);
      }
    }
    groups[key].push_back(std::move(coeff));
  }
  std::vector<Poly> eqs;
  for (auto& [k, terms] : groups) eqs.push_back(Poly::from_terms(std::move(terms)));
  return eqs;
}

int degree_of(const Poly& p, const std::string& name) {
  int d = 0;
  for (const auto& t : p.terms())
    for (const auto& [g, k] : t.mono.factors)
      if (g->kind == GenKind::Symbol && g->symbol == name) d = std::max(d, k);
  return d;
}

// Coefficients of name^0 .. name^deg.
std::vector<Poly> coefficients_of(const Poly& p, const std::string& name, int deg) {
  std::vector<std::vector<Term>> buckets(static_cast<std::size_t>(deg) + 1);
  for (const auto& t : p.terms()) {
    Term rest{Monomial{}, t.coeff};
    rest.mono.exp = t.mono.exp;
    int k = 0;
    for (const auto& f : t.mono.factors) {
      if (f.first->kind == GenKind::Symbol && f.first->symbol == name) {
        k = f.second;
      } else {
        rest.mono.factors.push_back(f);
      }
    }
    buckets[static_cast<std::size_t>(k)].push_back(std::move(rest));
  }
  std::vector<Poly> out;
  for (auto& b : buckets) out.push_back(Poly::from_terms(std::move(b)));
  return out;
}

std::set<std::string> unknowns_in(const Poly& p, const std::set<std::string>& unknowns) {
  std::set<std::string> out;
  for (const auto& t : p.terms())
    for (const auto& [g, k] : t.mono.factors)
      if (is_unknown(g, unknowns)) out.insert(g->symbol);
  return out;
}

// Smallest power of every unknown dividing all terms of p.
std::map<std::string, int> unknown_content(const Poly& p, const std::set<std::string>& unknowns) {
  std::map<std::string, int> out;
  bool first = true;
  for (const auto& t : p.terms()) {
    std::map<std::string, int> here;
    for (const auto& [g, k] : t.mono.factors)
      if (is_unknown(g, unknowns)) here[g->symbol] = k;
    if (first) {
      out = here;
      first = false;
      continue;
    }
    for (auto it = out.begin(); it != out.end();) {
      auto h = here.find(it->first);
      if (h == here.end()) {
        it = out.erase(it);
      } else {
        it->second = std::min(it->second, h->second);
        ++it;
      }
    }
  }
  return out;
}

Poly strip_content(const Poly& p, const std::map<std::string, int>& content) {
  std::vector<Term> terms;
  for (const auto& t : p.terms()) {
    Term u{Monomial{}, t.coeff};
    u.mono.exp = t.mono.exp;
    for (const auto& [g, k] : t.mono.factors) {
      auto it = g->kind == GenKind::Symbol ? content.find(g->symbol) : content.end();
      int left = it == content.end() ? k : k - it->second;
      if (left > 0) u.mono.factors.emplace_back(g, left);
    }
    terms.push_back(std::move(u));
  }
  return Poly::from_terms(std::move(terms));
}

RatFunc substitute_form(const RatFunc& r, const std::string& name, const RatFunc& value) {
  return cas::canonicalize(substitute(cas::to_expr(r), {{name, cas::to_expr(value)}}));
}

class Solver {
 public:
  Solver(std::set<std::string> unknowns, const SolveLimits& limits) : unknowns_(std::move(unknowns)), limits_(limits) {}

  void run(std::vector<Poly> eqs, std::vector<std::pair<std::string, RatFunc>> chosen) {
    if (out_.size() >= limits_.max_solutions || ++steps_ > limits_.max_steps) return;

    std::vector<Poly> live;
    for (auto& e : eqs) {
      if (e.is_zero()) continue;
      if (unknowns_in(e, unknowns_).empty()) return;  // nonzero equation without unknowns
      Poly m = e.scaled(Rational(1) / e.leading().coeff);
      if (std::none_of(live.begin(), live.end(), [&](const Poly& q) { return q == m; })) live.push_back(std::move(m));
    }
    if (live.empty()) {
      out_.push_back(std::move(chosen));
      return;
    }

    // Linear elimination where the pivot coefficient is free of unknowns.
    std::optional<std::pair<std::size_t, std::string>> pivot;
    for (std::size_t i = 0; i < live.size(); ++i) {
      for (const auto& u : unknowns_in(live[i], unknowns_)) {
        if (degree_of(live[i], u) != 1) continue;
        auto cs = coefficients_of(live[i], u, 1);
        if (!unknowns_in(cs[1], unknowns_).empty()) continue;
        if (!pivot || live[i].size() < live[pivot->first].size()) pivot = std::make_pair(i, u);
        break;
      }
    }
    if (pivot) {
      auto cs = coefficients_of(live[pivot->first], pivot->second, 1);
      assign(live, chosen, pivot->second, cas::make_ratfunc(-cs[0], cs[1]));
      return;
    }

    // A common factor u^k: the cofactor branch first, then u = 0.
    for (std::size_t i = 0; i < live.size(); ++i) {
      auto content = unknown_content(live[i], unknowns_);
      if (content.empty()) continue;
      std::vector<Poly> reduced = live;
      reduced[i] = strip_content(live[i], content);
      run(std::move(reduced), chosen);
      for (const auto& [u, k] : content) assign(live, chosen, u, RatFunc{});
      return;
    }

    // Univariate quadratics with a perfect-square discriminant.
    for (const auto& eq : live) {
      auto us = unknowns_in(eq, unknowns_);
      if (us.size() != 1) continue;
      const std::string& u = *us.begin();
      int deg = degree_of(eq, u);
      if (deg != 2 || deg > limits_.max_degree) continue;
      auto cs = coefficients_of(eq, u, 2);
      Poly disc = cs[1] * cs[1] - cs[2] * cs[0].scaled(4);
      auto root = cas::sqrt_exact(disc);
      if (!root) return;
      RatFunc two_a = cas::from_poly(cs[2].scaled(2));
      assign(live, chosen, u, cas::from_poly(-cs[1] + *root) / two_a);
      if (!root->is_zero()) assign(live, chosen, u, cas::from_poly(-cs[1] - *root) / two_a);
      return;
    }
  }

  std::vector<Assignment> solutions() const {
    std::vector<Assignment> out;
    for (const auto& chosen : out_) {
      // Later choices never mention earlier unknowns; substitute backwards.
      std::vector<RatFunc> values;
      for (const auto& c : chosen) values.push_back(c.second);
      Assignment a;
      for (std::size_t i = chosen.size(); i-- > 0;) {
        Expr v = cas::to_expr(values[i]);
        v = simplify(substitute(v, a));
        a[chosen[i].first] = v;
      }
      out.push_back(std::move(a));
    }
    return out;
  }

 private:
  void assign(const std::vector<Poly>& eqs, std::vector<std::pair<std::string, RatFunc>> chosen, const std::string& u,
              const RatFunc& value) {
    std::vector<Poly> next;
    try {
      for (const auto& e : eqs) next.push_back(substitute_form(cas::from_poly(e), u, value).num);
    } catch (const Error&) {
      return;
    }
    chosen.emplace_back(u, value);
    run(std::move(next), std::move(chosen));
  }

  std::set<std::string> unknowns_;
  SolveLimits limits_;
  std::size_t steps_ = 0;
  std::vector<std::vector<std::pair<std::string, RatFunc>>> out_;
};

}  // namespace

std::vector<Assignment> solve_identically_zero(const RatFunc& r, const std::vector<std::string>& unknowns,
                                               const std::set<std::string>& basis_symbols, const SolveLimits& limits) {
  if (r.is_zero()) return {Assignment{}};
  auto present = cas::symbols_of(r);
  std::set<std::string> live;
  for (const auto& u : unknowns)
    if (present.count(u)) live.insert(u);
  if (live.empty() || live.size() > limits.max_unknowns) return {};

  Classifier cls(live, basis_symbols);
  Solver solver(live, limits);
  solver.run(coefficient_equations(r.num, cls), {});
  return solver.solutions();
}

std::optional<Assignment> resolve_parameters(const Expr& residual, const std::set<std::string>& fresh,
                                             const SolveLimits& limits) {
  RatFunc r;
  try {
    r = cas::canonicalize(residual);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (r.is_zero()) return Assignment{};
  std::vector<std::string> unknowns(fresh.begin(), fresh.end());
  for (auto& a : solve_identically_zero(r, unknowns, {}, limits)) {
    try {
      if (cas::canonicalize(substitute(residual, a)).is_zero()) return a;
    } catch (const Error&) {
      // the assignment hits a singularity of the residual
    }
  }
  return std::nullopt;
}

}  // namespace pdesym
