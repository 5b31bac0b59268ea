#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pdesym/expr.hpp"
#include "pdesym/rational.hpp"

// Canonical forms for the zero certificate.
//
// An expression is represented as a quotient of two polynomials with exact rational
// coefficients. A monomial is a product of generator powers times at most one
// exponential factor exp(E), where E is itself a polynomial. Exponentials therefore
// merge on multiplication (exp(a)*exp(b) = exp(a + b), exp(0) = 1) and behave as
// units. Generators are named symbols (variables and parameters) and kernels
// (log, sin, cos, rational roots, and exp of a non-polynomial argument) whose
// arguments are canonical forms themselves.
//
// Normalization of a quotient: the leading denominator term carries no exponential,
// common monomial factors are removed, the polynomial gcd is cancelled and the
// denominator is made monic. cos^2 is rewritten as 1 - sin^2 and root powers are
// reduced below the root index, so sin^2 + cos^2 collapses to 1.
namespace pdesym::cas {

class Poly;
struct RatFunc;

enum class GenKind : std::uint8_t { Symbol, Log, Sin, Cos, Root, Exp, FreeExp };

struct Generator {
  GenKind kind = GenKind::Symbol;
  std::string key;  // identity and order
  std::string symbol;
  bool is_variable = false;
  std::shared_ptr<const RatFunc> arg;   // kernels
  int root_index = 0;                   // Root
  std::shared_ptr<const Poly> exp_arg;  // FreeExp (gcd helper only)
};

using Gen = std::shared_ptr<const Generator>;

Gen make_symbol(const std::string& name, bool is_variable);

struct Monomial {
  std::vector<std::pair<Gen, int>> factors;  // sorted by key, exponents > 0
  std::shared_ptr<const Poly> exp;           // null means exp(0)

  int degree() const;
  bool is_one() const { return factors.empty() && !exp; }
};

// Graded lexicographic order on generator keys, ties broken by the exponential factor.
int compare(const Monomial& a, const Monomial& b);
Monomial operator*(const Monomial& a, const Monomial& b);

struct Term {
  Monomial mono;
  Rational coeff;
};

class Poly {
 public:
  Poly() = default;
  static Poly constant(const Rational& c);
  static Poly monomial(Monomial m, const Rational& c = 1);
  static Poly symbol(const Gen& g, int power = 1);
  // Builds from arbitrary terms: sorts, merges equal monomials and drops zeros.
  static Poly from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;  // requires is_constant()
  const Term& leading() const { return terms_.front(); }
  std::size_t size() const { return terms_.size(); }
  bool has_exp() const;

  Poly operator-() const;
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const Rational& c) const;
  Poly times(const Monomial& m, const Rational& c = 1) const;

  friend int compare(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b) { return compare(a, b) == 0; }

 private:
  std::vector<Term> terms_;  // strictly decreasing monomials, nonzero coefficients
};

struct RatFunc {
  Poly num;
  Poly den = Poly::constant(1);

  bool is_zero() const { return num.is_zero(); }
  bool is_polynomial() const { return den.is_constant(); }
  bool is_constant() const { return num.is_constant() && den.is_constant(); }
  Rational constant_value() const;

  friend bool operator==(const RatFunc& a, const RatFunc& b) { return a.num == b.num && a.den == b.den; }
};

// Normalizing constructor. Throws DomainError when `den` is the zero polynomial.
RatFunc make_ratfunc(Poly num, Poly den);
RatFunc from_poly(Poly p);

RatFunc operator+(const RatFunc& a, const RatFunc& b);
RatFunc operator-(const RatFunc& a, const RatFunc& b);
RatFunc operator*(const RatFunc& a, const RatFunc& b);
RatFunc operator/(const RatFunc& a, const RatFunc& b);
RatFunc operator-(const RatFunc& a);
RatFunc pow(const RatFunc& base, long exponent);

RatFunc make_exp(const RatFunc& arg);
RatFunc make_log(const RatFunc& arg);
RatFunc make_sin(const RatFunc& arg);
RatFunc make_cos(const RatFunc& arg);
RatFunc make_root(const RatFunc& arg, int index);

// Operator semantics shared by canonicalize and the residual builder.
RatFunc apply_unary(UnaryOp op, const RatFunc& arg);
RatFunc apply_binary(BinaryOp op, const RatFunc& lhs, const RatFunc& rhs);

// Throws DomainError on literal division by zero and UnsupportedFunction on
// derivative atoms.
RatFunc canonicalize(const Expr& e);

// Expression tree for a canonical form; canonicalize(to_expr(r)) == r.
Expr to_expr(const RatFunc& r);
Expr to_expr(const Poly& p);
Expr to_expr(const Gen& g);

// Exact partial derivative with respect to the symbol `var`.
RatFunc differentiate(const RatFunc& r, const std::string& var);

// Names of all symbols occurring anywhere, including inside kernels and exponentials.
std::set<std::string> symbols_of(const Poly& p);
std::set<std::string> symbols_of(const RatFunc& r);

// Multivariate gcd over Q of two exponential-free polynomials, normalized monic.
// Returns 1 when the inputs exceed internal size limits.
Poly gcd(const Poly& a, const Poly& b);

// Exact quotient when `b` divides `a`.
std::optional<Poly> divide_exact(const Poly& a, const Poly& b);

// Polynomial square root when `p` is a perfect square of an exponential-free polynomial.
std::optional<Poly> sqrt_exact(const Poly& p);

}  // namespace pdesym::cas
