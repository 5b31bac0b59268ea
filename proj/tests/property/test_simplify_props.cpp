#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "pdesym/calculus.hpp"
#include "pdesym/canonical.hpp"
#include "pdesym/errors.hpp"
#include "pdesym/simplify.hpp"

using namespace pdesym;
using pdesym::proptest::ExprGen;
using pdesym::proptest::error_scale;

TEST(SimplifyProperty, PreservesValues) {
  ExprGen gen(31);
  gen.max_depth = 4;
  int compared = 0;
  for (int i = 0; i < 10000; ++i) {
    Expr e = gen();
    Expr s = simplify(e);
    for (int k = 0; k < 3; ++k) {
      auto pt = gen.point();
      auto a = eval_numeric(e, pt);
      if (!a) continue;
      auto b = eval_numeric(s, pt);
      // simplification may only remove singularities, never add them
      ASSERT_TRUE(b) << format(e) << " -> " << format(s);
      double scale = std::max({1.0, error_scale(e, pt).value_or(0), error_scale(s, pt).value_or(0)});
      if (scale > 1e12) continue;  // hopelessly conditioned in double precision
      ASSERT_LE(std::abs(*a - *b), 1e-9 * scale) << format(e) << " -> " << format(s) << ": " << *a << " vs " << *b;
      ++compared;
    }
  }
  EXPECT_GT(compared, 10000);
}

TEST(SimplifyProperty, Idempotent) {
  ExprGen gen(32);
  for (int i = 0; i < 2000; ++i) {
    Expr s = simplify(gen());
    ASSERT_EQ(simplify(s), s) << format(s);
  }
}

TEST(SimplifyProperty, CanonicalFormIgnoresRewriting) {
  // a + b and b + a, a*b and b*a, (a - b) + b and a all land on the same form
  ExprGen gen(33);
  for (int i = 0; i < 2000; ++i) {
    Expr a = gen();
    Expr b = gen();
    try {
      cas::canonicalize(a);
      cas::canonicalize(b);
    } catch (const Error&) {
      continue;
    }
    {
      ASSERT_EQ(simplify(a + b), simplify(b + a));
      ASSERT_EQ(simplify(a * b), simplify(b * a));
      ASSERT_EQ(simplify((a - b) + b), simplify(a));
    }
  }
}

// Every certificate is checked at 100 random points.
TEST(ZeroCertificateProperty, Sound) {
  ExprGen gen(34);
  gen.max_depth = 3;
  std::mt19937_64 rng(35);
  int certified = 0;
  for (int i = 0; i < 3000 && certified < 500; ++i) {
    Expr a = gen();
    Expr b = gen();
    try {
      cas::canonicalize(a * b);
    } catch (const Error&) {
      continue;
    }
    // Candidates that are often, but not always, identically zero.
    Expr candidates[] = {
        a * (b + Expr::var("x")) - (a * b + a * Expr::var("x")),
        exp(a) * exp(b) - exp(a + b),
        simplify(a) - a,
        differentiate(a * b, "x") - (differentiate(a, "x") * b + a * differentiate(b, "x")),
        a * a - b * b - (a - b) * (a + b),
        a - b,
        exp(a) - exp(b) * exp(a - b) + a - b,
    };
    for (const Expr& c : candidates) {
      ZeroVerdict v = zero_certificate(c, rng());
      if (!v.certified()) continue;
      ++certified;
      int evaluated = 0;
      for (int k = 0; k < 400 && evaluated < 100; ++k) {
        auto pt = gen.point();
        auto value = eval_numeric(c, pt);
        if (!value) continue;
        double scale = std::max(1.0, error_scale(c, pt).value_or(0));
        if (scale > 1e12) continue;
        ASSERT_LE(std::abs(*value), 1e-9 * scale) << format(c);
        ++evaluated;
      }
    }
  }
  EXPECT_GE(certified, 500);
}

TEST(ZeroCertificateProperty, WitnessesAreReal) {
  ExprGen gen(36);
  for (int i = 0; i < 2000; ++i) {
    Expr e = gen();
    ZeroVerdict v = zero_certificate(e);
    if (v.kind != ZeroKind::WitnessNonzero) continue;
    auto value = eval_numeric(e, v.point);
    ASSERT_TRUE(value);
    ASSERT_GT(std::abs(*value), 1e-6);
  }
}
