#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "pdesym/calculus.hpp"
#include "pdesym/errors.hpp"
#include "pdesym/canonical.hpp"
#include "pdesym/parser.hpp"
#include "pdesym/simplify.hpp"

using namespace pdesym;
using pdesym::proptest::ExprGen;

// Exact derivative against a central difference, h = 1e-5, tolerance 1e-6 relative.
TEST(CalculusProperty, MatchesFiniteDifferences) {
  ExprGen gen(21);
  gen.max_depth = 3;
  const double h = 1e-5;
  int checked = 0;
  int attempts = 0;
  while (checked < 400) {
    ASSERT_LT(++attempts, 20000) << "generator produced too few usable cases";
    Expr e = gen();
    const std::string var = gen.coin() ? "x" : "t";
    if (!contains_symbol(e, var)) continue;
    Expr d;
    try {
      d = differentiate(e, var);
    } catch (const Error&) {
      continue;
    }
    auto pt = gen.point(0.5, 2.0);
    auto at = [&](double offset) {
      auto q = pt;
      q[var] += offset;
      return eval_numeric(e, q);
    };
    auto exact = eval_numeric(d, pt);
    auto fp = at(h);
    auto fm = at(-h);
    auto f0 = at(0);
    if (!exact || !fp || !fm || !f0) continue;
    // Stay away from steep regions where the difference quotient itself is unreliable.
    if (std::abs(*f0) > 1e4 || std::abs(*exact) > 1e4) continue;
    double fd = (*fp - *fm) / (2 * h);
    ASSERT_LE(std::abs(fd - *exact), 1e-6 * (1 + std::abs(*exact))) << format(e) << " d/d" << var << " = " << format(d);
    ++checked;
  }
}

TEST(CalculusProperty, MixedPartialsCommute) {
  ExprGen gen(22);
  gen.max_depth = 3;
  for (int i = 0; i < 300; ++i) {
    Expr e = gen();
    try {
      Expr xt = differentiate(differentiate(e, "x"), "t");
      Expr tx = differentiate(differentiate(e, "t"), "x");
      ASSERT_TRUE(zero_certificate(xt - tx).certified()) << format(e);
    } catch (const Error&) {
    }
  }
}

TEST(CalculusProperty, DerivativeIsLinear) {
  ExprGen gen(23);
  gen.max_depth = 3;
  for (int i = 0; i < 300; ++i) {
    Expr f = gen();
    Expr g = gen();
    Expr k = Expr::constant(gen.small_rational());
    try {
      Expr lhs = differentiate(f + k * g, "x");
      Expr rhs = differentiate(f, "x") + k * differentiate(g, "x");
      ASSERT_TRUE(zero_certificate(lhs - rhs).certified()) << format(f) << " ; " << format(g);
    } catch (const Error&) {
    }
  }
}

// Superposition for a linear operator: heat residual of a*f + b*g equals a*R[f] + b*R[g].
TEST(CalculusProperty, HeatResidualIsLinear) {
  ParseContext ctx{{"x", "t"}, "u"};
  Expr op = parse_expr("u_t - a*u_xx", ctx);
  ExprGen gen(24);
  gen.max_depth = 3;
  gen.params = {"b"};
  for (int i = 0; i < 200; ++i) {
    Expr f = gen();
    Expr g = gen();
    try {
      cas::RatFunc combined = residual_form(op, Expr::param("k") * f + g);
      cas::RatFunc parts = cas::from_poly(cas::Poly::constant(0)) +
                           cas::canonicalize(Expr::param("k")) * residual_form(op, f) + residual_form(op, g);
      ASSERT_TRUE((combined - parts).is_zero()) << format(f) << " ; " << format(g);
    } catch (const Error&) {
    }
  }
}
