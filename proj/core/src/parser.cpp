#include "pdesym/parser.hpp"

#include <cctype>
#include <utility>
#include <vector>

#include "pdesym/errors.hpp"

namespace pdesym {

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& detail)
    : Error([&] {
        std::string msg = "syntax error at offset " + std::to_string(offset) + ": " + detail;
        if (!expected.empty()) {
          msg += " (expected one of:";
          for (const auto& e : expected) msg += " " + e;
          msg += ")";
        }
        return msg;
      }()),
      offset_(offset),
      expected_(std::move(expected)) {}

namespace {

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::optional<UnaryOp> function_named(std::string_view name) {
  if (name == "exp") return UnaryOp::Exp;
  if (name == "log") return UnaryOp::Log;
  if (name == "sin") return UnaryOp::Sin;
  if (name == "cos") return UnaryOp::Cos;
  if (name == "sqrt") return UnaryOp::Sqrt;
  if (name == "neg") return UnaryOp::Neg;
  return std::nullopt;
}

std::vector<std::string> split_letters(std::string_view letters) {
  std::vector<std::string> out;
  for (char c : letters) out.emplace_back(1, c);
  return out;
}

class InfixParser {
 public:
  InfixParser(std::string_view text, const ParseContext& ctx) : text_(text), ctx_(ctx) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail({"operator", "end of input"}, "unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail) const {
    throw SyntaxError(pos_, std::move(expected), detail);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * unary();
      } else if (accept('/')) {
        lhs = lhs / unary();
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    while (accept('^')) base = pow(base, signed_primary());
    return base;
  }

  Expr signed_primary() {
    if (accept('-')) return -signed_primary();
    return primary();
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    auto value = parse_rational(text_.substr(start, pos_ - start));
    if (!value) {
      pos_ = start;
      fail({"number"}, "malformed number");
    }
    return Expr::constant(*value);
  }

  Expr primary() {
    char c = peek();
    if (c == '\0') fail({"number", "identifier", "("}, "unexpected end of input");
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (!accept(')')) fail({")"}, "unbalanced parenthesis");
      return inner;
    }
    if (is_digit(c) || c == '.') return number();
    if (!is_letter(c)) fail({"number", "identifier", "("}, std::string("unexpected character '") + c + "'");

    std::size_t start = pos_;
    while (pos_ < text_.size() && is_letter(text_[pos_])) ++pos_;
    std::string ident(text_.substr(start, pos_ - start));

    if (pos_ < text_.size() && text_[pos_] == '_') {
      std::size_t vstart = ++pos_;
      while (pos_ < text_.size() && is_letter(text_[pos_])) ++pos_;
      std::string_view letters = text_.substr(vstart, pos_ - vstart);
      if (letters.empty()) fail({"variable letter"}, "empty derivative subscript");
      if (ctx_.unknown && ident != *ctx_.unknown) {
        pos_ = start;
        fail({*ctx_.unknown}, "derivative of '" + ident + "' but the unknown is '" + *ctx_.unknown + "'");
      }
      for (std::size_t i = 0; i < letters.size(); ++i) {
        if (!ctx_.variables.count(std::string(1, letters[i]))) {
          pos_ = vstart + i;
          fail({"variable letter"}, std::string("'") + letters[i] + "' is not an independent variable");
        }
      }
      return Expr::deriv(ident, split_letters(letters));
    }

    if (peek() == '(') {
      std::size_t call_pos = start;
      if (auto op = function_named(ident)) {
        ++pos_;
        Expr arg = expr();
        if (!accept(')')) fail({")"}, "unclosed function call");
        return Expr::unary(*op, arg);
      }
      if (ident.size() >= 2 && ident[0] == 'D') {
        std::string_view letters = std::string_view(ident).substr(1);
        bool all_vars = true;
        for (char v : letters) all_vars = all_vars && ctx_.variables.count(std::string(1, v)) > 0;
        if (all_vars) {
          ++pos_;
          Expr arg = expr();
          if (!accept(')')) fail({")"}, "unclosed derivative group");
          return Expr::diff(split_letters(letters), arg);
        }
      }
      pos_ = call_pos;
      fail({"exp", "log", "sin", "cos", "sqrt", "D<vars>"}, "unknown function '" + ident + "'");
    }

    if (function_named(ident)) fail({"("}, "function '" + ident + "' needs an argument");
    if (ctx_.unknown && ident == *ctx_.unknown) return Expr::deriv(ident, {});
    if (ctx_.variables.count(ident)) return Expr::var(ident);
    return Expr::param(ident);
  }

  std::string_view text_;
  const ParseContext& ctx_;
  std::size_t pos_ = 0;
};

class SexpParser {
 public:
  SexpParser(std::string_view text, const ParseContext& ctx) : text_(text), ctx_(ctx) {}

  Expr parse() {
    Expr e = node();
    skip_ws();
    if (pos_ != text_.size()) fail({"end of input"}, "trailing input after s-expression");
    return e;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail) const {
    throw SyntaxError(pos_, std::move(expected), detail);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string atom_token() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_) fail({"atom"}, "expected an atom");
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr leaf(const std::string& tok, std::size_t at) {
    if (is_digit(tok[0]) || tok[0] == '-' || tok[0] == '.') {
      auto value = parse_rational(tok);
      if (!value) {
        pos_ = at;
        fail({"number"}, "malformed number '" + tok + "'");
      }
      return Expr::constant(*value);
    }
    // Leaves reuse the infix rules for identifiers and derivative atoms.
    try {
      return InfixParser(tok, ctx_).parse();
    } catch (const SyntaxError& err) {
      throw SyntaxError(at + err.offset(), err.expected(), "bad symbol '" + tok + "'");
    }
  }

  Expr node() {
    skip_ws();
    if (pos_ >= text_.size()) fail({"(", "atom"}, "unexpected end of input");
    if (text_[pos_] != '(') {
      std::size_t at = pos_;
      return leaf(atom_token(), at);
    }
    ++pos_;
    std::size_t head_at = pos_;
    std::string head = atom_token();
    Expr out;
    if (head == "+" || head == "-" || head == "*" || head == "/" || head == "^") {
      Expr a = node();
      Expr b = node();
      static constexpr char kOps[] = "+-*/^";
      auto op = static_cast<BinaryOp>(std::string_view(kOps).find(head[0]));
      out = Expr::binary(op, a, b);
    } else if (auto fn = function_named(head)) {
      out = Expr::unary(*fn, node());
    } else if (head.size() >= 2 && head[0] == 'D') {
      out = Expr::diff(split_letters(std::string_view(head).substr(1)), node());
    } else {
      pos_ = head_at;
      fail({"+", "-", "*", "/", "^", "neg", "exp", "log", "sin", "cos", "sqrt"}, "unknown operator '" + head + "'");
    }
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != ')') fail({")"}, "unclosed s-expression");
    ++pos_;
    return out;
  }

  std::string_view text_;
  const ParseContext& ctx_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const ParseContext& ctx) { return InfixParser(text, ctx).parse(); }

Expr parse_sexp(std::string_view text, const ParseContext& ctx) { return SexpParser(text, ctx).parse(); }

std::string grammar_help() {
  return "Expression grammar:\n"
         "  operators   + - * / ^ and unary minus (precedence ^ > unary - > * / > + -)\n"
         "  functions   exp(e) log(e) sin(e) cos(e) sqrt(e)\n"
         "  numbers     integers, p/q via division, decimals such as 0.5\n"
         "  symbols     x y z t are variables; any other letter sequence is a parameter\n"
         "  derivatives u_t u_xx u_xt (one letter per differentiation)\n"
         "  groups      Dx(...) Dxx(...) Dt(...) Dxt(...) differentiate the whole group\n";
}

}  // namespace pdesym
