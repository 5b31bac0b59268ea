#include "pdesym/expr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "pdesym/errors.hpp"

namespace pdesym {

struct Node {
  NodeKind kind;
  Rational value;
  std::string name;
  std::uint8_t op = 0;
  std::vector<Expr> children;
  std::vector<std::string> vars;
  std::size_t hash = 0;
  std::size_t count = 1;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

std::shared_ptr<const Node> finish(Node n) {
  std::size_t h = std::hash<int>{}(static_cast<int>(n.kind));
  h = mix(h, n.op);
  switch (n.kind) {
    case NodeKind::Const: h = mix(h, hash_rational(n.value)); break;
    case NodeKind::Var:
    case NodeKind::Param:
    case NodeKind::Deriv: h = mix(h, std::hash<std::string>{}(n.name)); break;
    default: break;
  }
  for (const auto& v : n.vars) h = mix(h, std::hash<std::string>{}(v));
  for (const auto& c : n.children) {
    h = mix(h, c.hash());
    n.count += c.node_count();
  }
  n.hash = h;
  return std::make_shared<const Node>(std::move(n));
}

const std::shared_ptr<const Node>& zero_node() {
  static const std::shared_ptr<const Node> zero = [] {
    Node n{NodeKind::Const};
    n.value = 0;
    return finish(std::move(n));
  }();
  return zero;
}

}  // namespace

const char* name_of(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "neg";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Log: return "log";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Sqrt: return "sqrt";
  }
  return "?";
}

const char* name_of(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "add";
    case BinaryOp::Sub: return "sub";
    case BinaryOp::Mul: return "mul";
    case BinaryOp::Div: return "div";
    case BinaryOp::Pow: return "pow";
  }
  return "?";
}

Expr::Expr() : node_(zero_node()) {}

Expr Expr::constant(Rational value) {
  value.canonicalize();
  Node n{NodeKind::Const};
  n.value = std::move(value);
  return Expr(finish(std::move(n)));
}

Expr Expr::constant(long value) { return constant(Rational(value)); }

Expr Expr::var(std::string name) {
  Node n{NodeKind::Var};
  n.name = std::move(name);
  return Expr(finish(std::move(n)));
}

Expr Expr::param(std::string name) {
  Node n{NodeKind::Param};
  n.name = std::move(name);
  return Expr(finish(std::move(n)));
}

Expr Expr::unary(UnaryOp op, Expr child) {
  Node n{NodeKind::Unary};
  n.op = static_cast<std::uint8_t>(op);
  n.children.push_back(std::move(child));
  return Expr(finish(std::move(n)));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  Node n{NodeKind::Binary};
  n.op = static_cast<std::uint8_t>(op);
  n.children.push_back(std::move(lhs));
  n.children.push_back(std::move(rhs));
  return Expr(finish(std::move(n)));
}

Expr Expr::deriv(std::string unknown, std::vector<std::string> vars) {
  std::sort(vars.begin(), vars.end());
  Node n{NodeKind::Deriv};
  n.name = std::move(unknown);
  n.vars = std::move(vars);
  return Expr(finish(std::move(n)));
}

Expr Expr::diff(std::vector<std::string> vars, Expr child) {
  std::sort(vars.begin(), vars.end());
  Node n{NodeKind::Diff};
  n.vars = std::move(vars);
  n.children.push_back(std::move(child));
  return Expr(finish(std::move(n)));
}

NodeKind Expr::kind() const { return node_->kind; }
const Rational& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
UnaryOp Expr::unary_op() const { return static_cast<UnaryOp>(node_->op); }
BinaryOp Expr::binary_op() const { return static_cast<BinaryOp>(node_->op); }
const Expr& Expr::child() const { return node_->children.at(0); }
const Expr& Expr::lhs() const { return node_->children.at(0); }
const Expr& Expr::rhs() const { return node_->children.at(1); }
const std::vector<std::string>& Expr::vars() const { return node_->vars; }
bool Expr::is_zero() const { return is_const() && sgn(value()) == 0; }
bool Expr::is_one() const { return is_const() && value() == 1; }
std::size_t Expr::hash() const { return node_->hash; }
std::size_t Expr::node_count() const { return node_->count; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.hash != y.hash || x.kind != y.kind || x.op != y.op || x.count != y.count) return false;
  if (x.kind == NodeKind::Const && x.value != y.value) return false;
  if (x.name != y.name || x.vars != y.vars) return false;
  if (x.children.size() != y.children.size()) return false;
  for (std::size_t i = 0; i < x.children.size(); ++i)
    if (x.children[i] != y.children[i]) return false;
  return true;
}

bool structural_eq(const Expr& a, const Expr& b) { return a == b; }

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(UnaryOp::Neg, a); }
Expr pow(const Expr& base, const Expr& exponent) { return Expr::binary(BinaryOp::Pow, base, exponent); }
Expr exp(const Expr& e) { return Expr::unary(UnaryOp::Exp, e); }
Expr log(const Expr& e) { return Expr::unary(UnaryOp::Log, e); }
Expr sin(const Expr& e) { return Expr::unary(UnaryOp::Sin, e); }
Expr cos(const Expr& e) { return Expr::unary(UnaryOp::Cos, e); }
Expr sqrt(const Expr& e) { return Expr::unary(UnaryOp::Sqrt, e); }

std::string to_string(const PositionId& pos) {
  std::string out = "root";
  for (Step s : pos.path) {
    switch (s) {
      case Step::Left: out += ".left"; break;
      case Step::Right: out += ".right"; break;
      case Step::Only: out += ".only"; break;
    }
  }
  return out;
}

namespace {

void collect_positions(const Expr& e, PositionId& here, std::vector<PositionId>& out) {
  out.push_back(here);
  switch (e.kind()) {
    case NodeKind::Unary:
    case NodeKind::Diff:
      here.path.push_back(Step::Only);
      collect_positions(e.child(), here, out);
      here.path.pop_back();
      break;
    case NodeKind::Binary:
      here.path.push_back(Step::Left);
      collect_positions(e.lhs(), here, out);
      here.path.back() = Step::Right;
      collect_positions(e.rhs(), here, out);
      here.path.pop_back();
      break;
    default: break;
  }
}

const Expr& step_into(const Expr& e, Step s) {
  switch (e.kind()) {
    case NodeKind::Unary:
    case NodeKind::Diff:
      if (s == Step::Only) return e.child();
      break;
    case NodeKind::Binary:
      if (s == Step::Left) return e.lhs();
      if (s == Step::Right) return e.rhs();
      break;
    default: break;
  }
  throw InvalidPosition("position step does not exist in expression");
}

Expr rebuild_at(const Expr& e, const std::vector<Step>& path, std::size_t depth, const Expr& replacement) {
  if (depth == path.size()) return replacement;
  const Expr& inner = step_into(e, path[depth]);
  Expr updated = rebuild_at(inner, path, depth + 1, replacement);
  switch (e.kind()) {
    case NodeKind::Unary: return Expr::unary(e.unary_op(), updated);
    case NodeKind::Diff: return Expr::diff(e.vars(), updated);
    default:
      if (path[depth] == Step::Left) return Expr::binary(e.binary_op(), updated, e.rhs());
      return Expr::binary(e.binary_op(), e.lhs(), updated);
  }
}

void collect_symbols(const Expr& e, NodeKind kind, std::set<std::string>& out) {
  if (e.kind() == kind) out.insert(e.name());
  switch (e.kind()) {
    case NodeKind::Unary:
    case NodeKind::Diff: collect_symbols(e.child(), kind, out); break;
    case NodeKind::Binary:
      collect_symbols(e.lhs(), kind, out);
      collect_symbols(e.rhs(), kind, out);
      break;
    default: break;
  }
}

}  // namespace

std::vector<PositionId> positions(const Expr& e) {
  std::vector<PositionId> out;
  out.reserve(e.node_count());
  PositionId root;
  collect_positions(e, root, out);
  return out;
}

const Expr& subtree_at(const Expr& e, const PositionId& pos) {
  const Expr* cur = &e;
  for (Step s : pos.path) cur = &step_into(*cur, s);
  return *cur;
}

Expr replace_at(const Expr& e, const PositionId& pos, const Expr& replacement) {
  return rebuild_at(e, pos.path, 0, replacement);
}

std::set<std::string> variables_of(const Expr& e) {
  std::set<std::string> out;
  collect_symbols(e, NodeKind::Var, out);
  return out;
}

std::set<std::string> params_of(const Expr& e) {
  std::set<std::string> out;
  collect_symbols(e, NodeKind::Param, out);
  return out;
}

bool contains_symbol(const Expr& e, const std::string& name) {
  switch (e.kind()) {
    case NodeKind::Var:
    case NodeKind::Param: return e.name() == name;
    case NodeKind::Unary:
    case NodeKind::Diff: return contains_symbol(e.child(), name);
    case NodeKind::Binary: return contains_symbol(e.lhs(), name) || contains_symbol(e.rhs(), name);
    default: return false;
  }
}

bool contains_deriv(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Deriv:
    case NodeKind::Diff: return true;
    case NodeKind::Unary: return contains_deriv(e.child());
    case NodeKind::Binary: return contains_deriv(e.lhs()) || contains_deriv(e.rhs());
    default: return false;
  }
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
  switch (e.kind()) {
    case NodeKind::Var:
    case NodeKind::Param: {
      auto it = bindings.find(e.name());
      return it == bindings.end() ? e : it->second;
    }
    case NodeKind::Unary: {
      Expr c = substitute(e.child(), bindings);
      return c == e.child() ? e : Expr::unary(e.unary_op(), c);
    }
    case NodeKind::Diff: {
      Expr c = substitute(e.child(), bindings);
      return c == e.child() ? e : Expr::diff(e.vars(), c);
    }
    case NodeKind::Binary: {
      Expr l = substitute(e.lhs(), bindings);
      Expr r = substitute(e.rhs(), bindings);
      return (l == e.lhs() && r == e.rhs()) ? e : Expr::binary(e.binary_op(), l, r);
    }
    default: return e;
  }
}

namespace {

bool small_integer(const Rational& q, long limit) {
  return is_integer(q) && abs(q) <= limit;
}

Rational rational_power(const Rational& base, long n) {
  Rational out = 1;
  Rational b = n < 0 ? Rational(1) / base : base;
  for (long i = 0; i < std::labs(n); ++i) out *= b;
  return out;
}

Expr fold_impl(const Expr& e, bool tidy_mode) {
  switch (e.kind()) {
    case NodeKind::Unary: {
      Expr c = fold_impl(e.child(), tidy_mode);
      if (e.unary_op() == UnaryOp::Neg) {
        if (c.is_const()) return Expr::constant(-c.value());
        if (c.kind() == NodeKind::Unary && c.unary_op() == UnaryOp::Neg) return c.child();
      }
      if (c.is_zero()) {
        if (e.unary_op() == UnaryOp::Exp || e.unary_op() == UnaryOp::Cos) return Expr::constant(1);
        if (e.unary_op() == UnaryOp::Sin || e.unary_op() == UnaryOp::Sqrt) return Expr::constant(0);
      }
      if (c.is_one() && e.unary_op() == UnaryOp::Log) return Expr::constant(0);
      if (c.is_const() && e.unary_op() == UnaryOp::Sqrt) {
        if (auto r = exact_sqrt(c.value())) return Expr::constant(*r);
      }
      return c == e.child() ? e : Expr::unary(e.unary_op(), c);
    }
    case NodeKind::Diff: {
      Expr c = fold_impl(e.child(), tidy_mode);
      return c == e.child() ? e : Expr::diff(e.vars(), c);
    }
    case NodeKind::Binary: {
      Expr l = fold_impl(e.lhs(), tidy_mode);
      Expr r = fold_impl(e.rhs(), tidy_mode);
      BinaryOp op = e.binary_op();
      if (l.is_const() && r.is_const()) {
        const Rational& a = l.value();
        const Rational& b = r.value();
        switch (op) {
          case BinaryOp::Add: return Expr::constant(a + b);
          case BinaryOp::Sub: return Expr::constant(a - b);
          case BinaryOp::Mul: return Expr::constant(a * b);
          case BinaryOp::Div:
            if (sgn(b) != 0) return Expr::constant(a / b);
            break;
          case BinaryOp::Pow:
            if (small_integer(b, 64) && (sgn(a) != 0 || sgn(b) > 0)) return Expr::constant(rational_power(a, b.get_num().get_si()));
            break;
        }
      }
      switch (op) {
        case BinaryOp::Add:
          if (l.is_zero()) return r;
          if (r.is_zero()) return l;
          if (tidy_mode && r.kind() == NodeKind::Unary && r.unary_op() == UnaryOp::Neg) return fold_impl(l - r.child(), true);
          if (tidy_mode && r.is_const() && sgn(r.value()) < 0) return l - Expr::constant(-r.value());
          break;
        case BinaryOp::Sub:
          if (r.is_zero()) return l;
          if (l.is_zero()) return fold_impl(-r, tidy_mode);
          if (tidy_mode && r.kind() == NodeKind::Unary && r.unary_op() == UnaryOp::Neg) return fold_impl(l + r.child(), true);
          if (tidy_mode && r.is_const() && sgn(r.value()) < 0) return l + Expr::constant(-r.value());
          break;
        case BinaryOp::Mul:
          if (l.is_zero() || r.is_zero()) return Expr::constant(0);
          if (l.is_one()) return r;
          if (r.is_one()) return l;
          if (tidy_mode && l.is_const() && l.value() == -1) return fold_impl(-r, true);
          if (tidy_mode && l.kind() == NodeKind::Unary && l.unary_op() == UnaryOp::Neg) return fold_impl(-(l.child() * r), true);
          if (tidy_mode && r.kind() == NodeKind::Binary && r.binary_op() == BinaryOp::Mul)
            return fold_impl((l * r.lhs()) * r.rhs(), true);
          // 1/3*t reads better as t/3
          if (tidy_mode && l.is_const() && !is_integer(l.value())) {
            Expr num = Expr::constant(Rational(l.value().get_num()));
            Expr den = Expr::constant(Rational(l.value().get_den()));
            return fold_impl((num * r) / den, true);
          }
          break;
        case BinaryOp::Div:
          if (r.is_one()) return l;
          if (l.is_zero() && !(r.is_zero())) return Expr::constant(0);
          if (tidy_mode && l.kind() == NodeKind::Unary && l.unary_op() == UnaryOp::Neg) return fold_impl(-(l.child() / r), true);
          break;
        case BinaryOp::Pow:
          if (r.is_one()) return l;
          if (r.is_zero()) return Expr::constant(1);
          break;
      }
      return (l == e.lhs() && r == e.rhs()) ? e : Expr::binary(op, l, r);
    }
    default: return e;
  }
}

}  // namespace

Expr fold_constants(const Expr& e) { return fold_impl(e, false); }

Expr tidy(const Expr& e) { return fold_impl(e, true); }

namespace {

std::optional<double> finite(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::optional<double> eval_numeric(const Expr& e, const std::map<std::string, double>& bindings) {
  switch (e.kind()) {
    case NodeKind::Const: return to_double(e.value());
    case NodeKind::Var:
    case NodeKind::Param: {
      auto it = bindings.find(e.name());
      if (it == bindings.end()) return std::nullopt;
      return it->second;
    }
    case NodeKind::Deriv:
    case NodeKind::Diff: return std::nullopt;
    case NodeKind::Unary: {
      auto c = eval_numeric(e.child(), bindings);
      if (!c) return std::nullopt;
      double v = *c;
      switch (e.unary_op()) {
        case UnaryOp::Neg: return -v;
        case UnaryOp::Exp: return finite(std::exp(v));
        case UnaryOp::Log:
          if (v <= 0.0) return std::nullopt;
          return finite(std::log(v));
        case UnaryOp::Sin: return std::sin(v);
        case UnaryOp::Cos: return std::cos(v);
        case UnaryOp::Sqrt:
          if (v < 0.0) return std::nullopt;
          return std::sqrt(v);
      }
      return std::nullopt;
    }
    case NodeKind::Binary: {
      auto l = eval_numeric(e.lhs(), bindings);
      if (!l) return std::nullopt;
      auto r = eval_numeric(e.rhs(), bindings);
      if (!r) return std::nullopt;
      switch (e.binary_op()) {
        case BinaryOp::Add: return finite(*l + *r);
        case BinaryOp::Sub: return finite(*l - *r);
        case BinaryOp::Mul: return finite(*l * *r);
        case BinaryOp::Div:
          if (*r == 0.0) return std::nullopt;
          return finite(*l / *r);
        case BinaryOp::Pow: {
          bool integral = std::floor(*r) == *r;
          if (*l < 0.0 && !integral) return std::nullopt;
          if (*l == 0.0 && *r < 0.0) return std::nullopt;
          return finite(std::pow(*l, *r));
        }
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace pdesym
