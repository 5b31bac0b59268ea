#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pdesym/rational.hpp"

namespace pdesym {

enum class NodeKind : std::uint8_t { Const, Var, Param, Unary, Binary, Deriv, Diff };
enum class UnaryOp : std::uint8_t { Neg, Exp, Log, Sin, Cos, Sqrt };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Pow };

const char* name_of(UnaryOp op);
const char* name_of(BinaryOp op);

struct Node;

// Immutable expression tree handle. Copies share the underlying nodes.
//
// Besides the five solution-level node kinds (constants, variables, parameters,
// unary and binary operators) an Expr may hold two operator-level kinds used only
// inside PDE operators:
//   Deriv  a partial derivative atom of the unknown, e.g. u_xx. An empty variable
//          list denotes the unknown itself.
//   Diff   a derivative applied to a parenthesized group, e.g. Dxx(u_t + u*u_x).
// Derivative variable lists are kept sorted, so mixed partials compare equal.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(Rational value);
  static Expr constant(long value);
  static Expr var(std::string name);
  static Expr param(std::string name);
  static Expr unary(UnaryOp op, Expr child);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr deriv(std::string unknown, std::vector<std::string> vars);
  static Expr diff(std::vector<std::string> vars, Expr child);

  NodeKind kind() const;
  const Rational& value() const;              // Const
  const std::string& name() const;            // Var, Param, Deriv (unknown name)
  UnaryOp unary_op() const;                   // Unary
  BinaryOp binary_op() const;                 // Binary
  const Expr& child() const;                  // Unary, Diff
  const Expr& lhs() const;                    // Binary
  const Expr& rhs() const;                    // Binary
  const std::vector<std::string>& vars() const;  // Deriv, Diff

  bool is_const() const { return kind() == NodeKind::Const; }
  bool is_zero() const;
  bool is_one() const;

  std::size_t hash() const;
  std::size_t node_count() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr sqrt(const Expr& e);

bool structural_eq(const Expr& a, const Expr& b);

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

// Path from the root to a node. `Only` steps into the child of a unary or group node.
enum class Step : std::uint8_t { Left, Right, Only };

struct PositionId {
  std::vector<Step> path;

  friend bool operator==(const PositionId&, const PositionId&) = default;
  friend auto operator<=>(const PositionId&, const PositionId&) = default;
};

std::string to_string(const PositionId& pos);

// Preorder enumeration of every node position; size equals node_count().
std::vector<PositionId> positions(const Expr& e);

// Throws InvalidPosition when the path leaves the tree.
const Expr& subtree_at(const Expr& e, const PositionId& pos);
Expr replace_at(const Expr& e, const PositionId& pos, const Expr& replacement);

std::set<std::string> variables_of(const Expr& e);
std::set<std::string> params_of(const Expr& e);
bool contains_symbol(const Expr& e, const std::string& name);
bool contains_deriv(const Expr& e);

// Replaces Var or Param leaves by name.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);

// Folds purely numeric subtrees with exact integer powers and removes neutral
// elements. Semantics preserving wherever `e` is defined.
Expr fold_constants(const Expr& e);

// fold_constants plus presentation rewrites: a + (-b) -> a - b, (-a)*b -> -(a*b), ...
Expr tidy(const Expr& e);

// IEEE evaluation. std::nullopt marks an evaluation-domain violation (division by
// zero, log of a non-positive value, sqrt of a negative value, non-finite result) or
// an unbound symbol.
std::optional<double> eval_numeric(const Expr& e, const std::map<std::string, double>& bindings);

}  // namespace pdesym
