#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "pdesym/expr.hpp"

namespace pdesym {

// How identifiers are classified while parsing.
struct ParseContext {
  std::set<std::string> variables{"t", "x", "y", "z"};
  // Name of the unknown field. When set, `u` parses to the unknown itself and
  // `u_xt` to a derivative atom; when unset any `name_vars` token is a derivative atom.
  std::optional<std::string> unknown;
};

// Grammar (precedence pow > unary minus > mul/div > add/sub, all left associative):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' signed)*
//   signed  := '-' signed | primary
//   primary := number | ident | ident '_' letters | func '(' expr ')'
//            | 'D' letters '(' expr ')' | '(' expr ')'
// Throws SyntaxError carrying the byte offset and the expected-token set.
Expr parse_expr(std::string_view text, const ParseContext& ctx = {});

// Reads the prefix form produced by format_sexp.
Expr parse_sexp(std::string_view text, const ParseContext& ctx = {});

// Text shown by the CLI on usage errors.
std::string grammar_help();

}  // namespace pdesym
