#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace pdesym {

// Exact rational constant. Always stored canonicalized (positive denominator, reduced).
using Rational = mpq_class;

// "p" or "p/q" (q > 1).
std::string to_string(const Rational& q);

// Accepts "p", "-p", "p/q" and plain decimals such as "0.5".
std::optional<Rational> parse_rational(std::string_view text);

bool is_integer(const Rational& q);

// Exact square root when both numerator and denominator are perfect squares.
std::optional<Rational> exact_sqrt(const Rational& q);

double to_double(const Rational& q);

std::size_t hash_rational(const Rational& q);

}  // namespace pdesym
