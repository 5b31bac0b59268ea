#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pdesym/expr.hpp"
#include "pdesym/format.hpp"

namespace pdesym::proptest {

// Random trees for property tests. Everything is driven by one mt19937_64 so a
// failing case is reproduced from its seed.
struct ExprGen {
  std::mt19937_64 rng;
  std::vector<std::string> vars{"x", "t"};
  std::vector<std::string> params{"a", "b"};
  int max_depth = 4;
  bool transcendental = true;  // exp, log, sin, cos, sqrt
  bool division = true;

  explicit ExprGen(std::uint64_t seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

  Rational small_rational() {
    int num = std::uniform_int_distribution<int>(-5, 5)(rng);
    int den = coin(0.25) ? std::uniform_int_distribution<int>(2, 4)(rng) : 1;
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  Expr leaf() {
    int k = pick(10);
    if (k < 4) return Expr::var(vars[pick(static_cast<int>(vars.size()))]);
    if (k < 7 && !params.empty()) return Expr::param(params[pick(static_cast<int>(params.size()))]);
    return Expr::constant(small_rational());
  }

  Expr operator()(int depth = 0) {
    if (depth >= max_depth || coin(0.3)) return leaf();
    int k = pick(transcendental ? 10 : 6);
    Expr a = (*this)(depth + 1);
    switch (k) {
      case 0: return a + (*this)(depth + 1);
      case 1: return a - (*this)(depth + 1);
      case 2:
      case 3: return a * (*this)(depth + 1);
      case 4:
        if (division) return a / (*this)(depth + 1);
        return a * (*this)(depth + 1);
      case 5: return pow(a, Expr::constant(pick(3) + 2));
      case 6: return coin() ? -a : exp(a);
      case 7: return coin() ? sin(a) : cos(a);
      case 8: return log(a);
      default: return sqrt(a);
    }
  }

  // A point inside the sampling box used by the numeric checks.
  std::map<std::string, double> point(double lo = 0.3, double hi = 2.7) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::map<std::string, double> out;
    for (const auto& v : vars) out[v] = d(rng);
    for (const auto& p : params) out[p] = d(rng);
    return out;
  }
};

// Same tree rebuilt node by node, so no storage is shared with the input.
inline Expr deep_copy(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Const: return Expr::constant(e.value());
    case NodeKind::Var: return Expr::var(e.name());
    case NodeKind::Param: return Expr::param(e.name());
    case NodeKind::Unary: return Expr::unary(e.unary_op(), deep_copy(e.child()));
    case NodeKind::Binary: return Expr::binary(e.binary_op(), deep_copy(e.lhs()), deep_copy(e.rhs()));
    case NodeKind::Deriv: return Expr::deriv(e.name(), e.vars());
    case NodeKind::Diff: return Expr::diff(e.vars(), deep_copy(e.child()));
  }
  return e;
}

// First-order rounding scale of evaluating `e` as written: sums and products of
// absolute values, with argument errors pushed through each function. A relative
// tolerance is taken against this rather than |value|, so cancellation in an
// expanded polynomial is not mistaken for a wrong answer.
inline std::optional<double> error_scale(const Expr& e, const std::map<std::string, double>& pt) {
  auto v = eval_numeric(e, pt);
  if (!v) return std::nullopt;
  switch (e.kind()) {
    case NodeKind::Unary: {
      auto arg = eval_numeric(e.child(), pt);
      auto m = error_scale(e.child(), pt);
      if (!arg || !m) return std::nullopt;
      switch (e.unary_op()) {
        case UnaryOp::Neg: return *m;
        case UnaryOp::Exp: return std::abs(*v) * (1 + *m);
        case UnaryOp::Log: return std::abs(*v) + *m / std::abs(*arg);
        case UnaryOp::Sin:
        case UnaryOp::Cos: return 1 + *m;
        case UnaryOp::Sqrt: return std::abs(*v) + *m / (2 * std::max(std::abs(*v), 1e-300));
      }
      return std::nullopt;
    }
    case NodeKind::Binary: {
      auto ml = error_scale(e.lhs(), pt);
      auto mr = error_scale(e.rhs(), pt);
      auto vl = eval_numeric(e.lhs(), pt);
      auto vr = eval_numeric(e.rhs(), pt);
      if (!ml || !mr || !vl || !vr) return std::nullopt;
      switch (e.binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return *ml + *mr;
        case BinaryOp::Mul: return *ml * *mr;
        case BinaryOp::Div: return *ml / std::abs(*vr) + std::abs(*v) * *mr / std::abs(*vr);
        case BinaryOp::Pow: {
          if (e.rhs().is_const()) return std::pow(*ml, std::abs(*vr));
          return std::abs(*v) * (1 + *mr * (1 + std::abs(std::log(std::abs(*vl)))) + std::abs(*vr) * *ml / std::abs(*vl));
        }
      }
      return std::nullopt;
    }
    default: return std::abs(*v);
  }
}

inline bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * (1.0 + std::max(std::abs(a), std::abs(b))); }

}  // namespace pdesym::proptest
