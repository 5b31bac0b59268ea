#include "pdesym/format.hpp"

namespace pdesym {

namespace {

// Binding strength of the outermost construct of the printed text.
enum Prec : int { kSum = 1, kProduct = 2, kNeg = 3, kPow = 4, kAtom = 5 };

int precedence(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Const:
      if (!is_integer(e.value())) return kProduct;
      return sgn(e.value()) < 0 ? kNeg : kAtom;
    case NodeKind::Unary: return e.unary_op() == UnaryOp::Neg ? kNeg : kAtom;
    case NodeKind::Binary:
      switch (e.binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return kSum;
        case BinaryOp::Mul:
        case BinaryOp::Div: return kProduct;
        case BinaryOp::Pow: return kPow;
      }
      return kAtom;
    default: return kAtom;
  }
}

// True when the printed text starts with '-', e.g. -1/3 or (-a)*b printed as -a*b.
bool leads_with_minus(const Expr& e) {
  if (e.kind() == NodeKind::Const) return sgn(e.value()) < 0;
  if (e.kind() == NodeKind::Binary && (e.binary_op() == BinaryOp::Mul || e.binary_op() == BinaryOp::Div))
    return precedence(e.lhs()) >= kProduct && leads_with_minus(e.lhs());
  return e.kind() == NodeKind::Unary && e.unary_op() == UnaryOp::Neg;
}

void emit(const Expr& e, std::string& out);

void emit_wrapped(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  emit(e, out);
  if (parens) out += ')';
}

const char* symbol_of(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return " + ";
    case BinaryOp::Sub: return " - ";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Pow: return "^";
  }
  return "?";
}

void emit(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::Const: out += to_string(e.value()); return;
    case NodeKind::Var:
    case NodeKind::Param: out += e.name(); return;
    case NodeKind::Deriv:
      out += e.name();
      if (!e.vars().empty()) {
        out += '_';
        for (const auto& v : e.vars()) out += v;
      }
      return;
    case NodeKind::Diff:
      out += 'D';
      for (const auto& v : e.vars()) out += v;
      out += '(';
      emit(e.child(), out);
      out += ')';
      return;
    case NodeKind::Unary:
      if (e.unary_op() == UnaryOp::Neg) {
        out += '-';
        emit_wrapped(e.child(), precedence(e.child()) <= kNeg, out);
        return;
      }
      out += name_of(e.unary_op());
      out += '(';
      emit(e.child(), out);
      out += ')';
      return;
    case NodeKind::Binary: {
      BinaryOp op = e.binary_op();
      int p = precedence(e);
      if (op == BinaryOp::Pow) {
        emit_wrapped(e.lhs(), precedence(e.lhs()) < kAtom, out);
        out += '^';
        emit_wrapped(e.rhs(), precedence(e.rhs()) < kAtom, out);
        return;
      }
      emit_wrapped(e.lhs(), precedence(e.lhs()) < p, out);
      out += symbol_of(op);
      emit_wrapped(e.rhs(), precedence(e.rhs()) <= p || leads_with_minus(e.rhs()), out);
      return;
    }
  }
}

void emit_sexp(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::Const: out += to_string(e.value()); return;
    case NodeKind::Var:
    case NodeKind::Param:
    case NodeKind::Deriv: emit(e, out); return;
    case NodeKind::Diff:
      out += "(D";
      for (const auto& v : e.vars()) out += v;
      out += ' ';
      emit_sexp(e.child(), out);
      out += ')';
      return;
    case NodeKind::Unary:
      out += '(';
      out += name_of(e.unary_op());
      out += ' ';
      emit_sexp(e.child(), out);
      out += ')';
      return;
    case NodeKind::Binary: {
      static constexpr const char* kOps[] = {"+", "-", "*", "/", "^"};
      out += '(';
      out += kOps[static_cast<int>(e.binary_op())];
      out += ' ';
      emit_sexp(e.lhs(), out);
      out += ' ';
      emit_sexp(e.rhs(), out);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string format(const Expr& e) {
  std::string out;
  emit(e, out);
  return out;
}

std::string format_sexp(const Expr& e) {
  std::string out;
  emit_sexp(e, out);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << format(e); }

}  // namespace pdesym
