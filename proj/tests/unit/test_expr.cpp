#include <gtest/gtest.h>

#include <unordered_set>

#include "pdesym/errors.hpp"
#include "pdesym/expr.hpp"
#include "pdesym/format.hpp"
#include "pdesym/parser.hpp"

using namespace pdesym;

namespace {

Expr P(const std::string& s) { return parse_expr(s); }

}  // namespace

TEST(Rational, TextForms) {
  EXPECT_EQ(to_string(Rational(1, 2)), "1/2");
  // constants are reduced on construction
  EXPECT_EQ(Expr::constant(Rational(3, 6)), Expr::constant(Rational(1, 2)));
  EXPECT_EQ(to_string(Rational(-4)), "-4");
  EXPECT_EQ(*parse_rational("0.25"), Rational(1, 4));
  EXPECT_EQ(*parse_rational("-3/9"), Rational(-1, 3));
  EXPECT_FALSE(parse_rational("1/0"));
  EXPECT_FALSE(parse_rational("abc"));
  EXPECT_EQ(*exact_sqrt(Rational(9, 4)), Rational(3, 2));
  EXPECT_FALSE(exact_sqrt(Rational(2)));
  EXPECT_FALSE(exact_sqrt(Rational(-4)));
}

TEST(Expr, StructuralEqualityAndHash) {
  Expr a = exp(Expr::var("x") + Expr::param("a") * Expr::var("t"));
  Expr b = exp(Expr::var("x") + Expr::param("a") * Expr::var("t"));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a, exp(Expr::var("x") + Expr::var("t") * Expr::param("a")));
  // a variable and a parameter with the same name differ
  EXPECT_NE(Expr::var("a"), Expr::param("a"));
  std::unordered_set<Expr, ExprHash> set{a, b};
  EXPECT_EQ(set.size(), 1u);
}

TEST(Expr, DerivativeVariablesAreSorted) {
  EXPECT_EQ(Expr::deriv("u", {"x", "t"}), Expr::deriv("u", {"t", "x"}));
  EXPECT_EQ(format(Expr::deriv("u", {"x", "t"})), "u_tx");
}

TEST(Expr, PositionsArePreorder) {
  Expr e = P("x + a*t");
  auto ps = positions(e);
  ASSERT_EQ(ps.size(), e.node_count());
  ASSERT_EQ(ps.size(), 5u);
  EXPECT_TRUE(ps[0].path.empty());
  EXPECT_EQ(subtree_at(e, ps[1]), Expr::var("x"));
  EXPECT_EQ(subtree_at(e, ps[2]), P("a*t"));
  EXPECT_EQ(subtree_at(e, ps[4]), Expr::var("t"));
  EXPECT_EQ(replace_at(e, ps[1], P("x^2")), P("x^2 + a*t"));
  EXPECT_THROW(subtree_at(e, PositionId{{Step::Only}}), InvalidPosition);
  EXPECT_THROW(subtree_at(Expr::var("x"), PositionId{{Step::Left}}), InvalidPosition);
}

TEST(Expr, SymbolQueries) {
  Expr e = P("A*exp(x + a*t) + B");
  EXPECT_EQ(variables_of(e), (std::set<std::string>{"t", "x"}));
  EXPECT_EQ(params_of(e), (std::set<std::string>{"A", "B", "a"}));
  EXPECT_TRUE(contains_symbol(e, "B"));
  EXPECT_FALSE(contains_symbol(e, "y"));
  EXPECT_FALSE(contains_deriv(e));
  EXPECT_TRUE(contains_deriv(parse_expr("u_t - u_xx", {{"x", "t"}, "u"})));
}

TEST(Expr, Substitute) {
  Expr e = P("x/(p + t)");
  EXPECT_EQ(substitute(e, {{"p", Expr::constant(1)}}), P("x/(1 + t)"));
  EXPECT_EQ(substitute(e, {{"t", Expr::constant(0)}}), P("x/(p + 0)"));
}

TEST(Expr, FoldConstants) {
  EXPECT_EQ(fold_constants(P("2*3 + x*1 + 0")), P("6 + x"));
  EXPECT_EQ(fold_constants(P("(1/2)^2")), Expr::constant(Rational(1, 4)));
  EXPECT_EQ(fold_constants(P("exp(0)*x")), P("x"));
  EXPECT_EQ(fold_constants(P("sqrt(9/4)")), Expr::constant(Rational(3, 2)));
  // division by a literal zero is left alone
  EXPECT_EQ(fold_constants(P("1/0")), P("1/0"));
}

TEST(Expr, Tidy) {
  EXPECT_EQ(format(tidy(P("x + -1*a*t"))), "x - a*t");
  EXPECT_EQ(format(tidy(P("2*(B*a)*t"))), "2*B*a*t");
  EXPECT_EQ(format(tidy(P("x/2 + 1/3*t"))), "x/2 + t/3");
}

TEST(Expr, EvalNumeric) {
  Expr e = P("exp(x) + log(t) + sqrt(a)");
  auto v = eval_numeric(e, {{"x", 0.0}, {"t", 1.0}, {"a", 4.0}});
  ASSERT_TRUE(v);
  EXPECT_DOUBLE_EQ(*v, 3.0);
  EXPECT_FALSE(eval_numeric(P("1/x"), {{"x", 0.0}}));
  EXPECT_FALSE(eval_numeric(P("log(x)"), {{"x", -1.0}}));
  EXPECT_FALSE(eval_numeric(P("sqrt(x)"), {{"x", -1.0}}));
  EXPECT_FALSE(eval_numeric(P("x + y"), {{"x", 1.0}}));
}

TEST(Parser, PrecedenceAndAssociativity) {
  EXPECT_EQ(P("-x^2"), -pow(Expr::var("x"), Expr::constant(2)));
  EXPECT_EQ(P("a - b - c"), (Expr::param("a") - Expr::param("b")) - Expr::param("c"));
  EXPECT_EQ(P("a/b*c"), (Expr::param("a") / Expr::param("b")) * Expr::param("c"));
  EXPECT_EQ(P("2^-1"), pow(Expr::constant(2), -Expr::constant(1)));
  EXPECT_EQ(P("0.5"), Expr::constant(Rational(1, 2)));
}

TEST(Parser, Classification) {
  EXPECT_EQ(P("x").kind(), NodeKind::Var);
  EXPECT_EQ(P("lambda").kind(), NodeKind::Param);
  ParseContext ctx{{"x", "t"}, "u"};
  EXPECT_EQ(parse_expr("u", ctx), Expr::deriv("u", {}));
  EXPECT_EQ(parse_expr("u_xt", ctx), Expr::deriv("u", {"t", "x"}));
  Expr g = parse_expr("Dxx(u_t + u*u_x)", ctx);
  EXPECT_EQ(g.kind(), NodeKind::Diff);
  EXPECT_EQ(g.vars(), (std::vector<std::string>{"x", "x"}));
  // y is not a variable of this problem, so u_y is rejected
  EXPECT_THROW(parse_expr("u_y", ctx), Error);
}

TEST(Parser, Errors) {
  try {
    P("exp(x");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 5u);
    EXPECT_NE(std::find(e.expected().begin(), e.expected().end(), ")"), e.expected().end());
  }
  EXPECT_THROW(P(""), SyntaxError);
  EXPECT_THROW(P("x +"), SyntaxError);
  EXPECT_THROW(P("x $ y"), SyntaxError);
  EXPECT_THROW(P("foo(x)"), Error);
  EXPECT_THROW(P("(x))"), SyntaxError);
  EXPECT_NE(grammar_help().find("exp"), std::string::npos);
}

TEST(Format, Infix) {
  EXPECT_EQ(format(P("A*exp(x + a*t)")), "A*exp(x + a*t)");
  EXPECT_EQ(format(P("(B + x)/(A + t)")), "(B + x)/(A + t)");
  EXPECT_EQ(format(P("a - (b - c)")), "a - (b - c)");
  EXPECT_EQ(format(P("(x^2)^3")), "(x^2)^3");
  EXPECT_EQ(format(P("x^(2^3)")), "x^(2^3)");
  EXPECT_EQ(format(Expr::constant(Rational(1, 3)) * Expr::var("t")), "1/3*t");
}

TEST(Format, Sexp) {
  Expr e = P("A*exp(x/2 + t/3)");
  EXPECT_EQ(format_sexp(e), "(* A (exp (+ (/ x 2) (/ t 3))))");
  EXPECT_EQ(parse_sexp(format_sexp(e)), e);
  EXPECT_EQ(format_sexp(Expr::constant(Rational(-1, 3))), "-1/3");
  EXPECT_EQ(parse_sexp("(+ x -1/3)"), Expr::var("x") + Expr::constant(Rational(-1, 3)));
  EXPECT_THROW(parse_sexp("(+ x"), SyntaxError);
  EXPECT_THROW(parse_sexp("(frob x)"), Error);
}
