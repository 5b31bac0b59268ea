#include "pdesym/rational.hpp"

#include <cctype>

namespace pdesym {

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  Rational out;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    mpz_class d(std::string(den), 10);
    if (d == 0) return std::nullopt;
    out = Rational(mpz_class(std::string(num), 10), d);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot);
    auto frac = text.substr(dot + 1);
    if (whole.empty() && frac.empty()) return std::nullopt;
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac))) return std::nullopt;
    mpz_class scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    std::string digits = std::string(whole) + std::string(frac);
    out = Rational(mpz_class(digits.empty() ? std::string("0") : digits, 10), scale);
  } else {
    if (!all_digits(text)) return std::nullopt;
    out = Rational(mpz_class(std::string(text), 10));
  }
  out.canonicalize();
  if (negative) out = -out;
  return out;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

std::optional<Rational> exact_sqrt(const Rational& q) {
  if (sgn(q) < 0) return std::nullopt;
  mpz_class n = q.get_num();
  mpz_class d = q.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
  Rational r(sqrt(n), sqrt(d));
  r.canonicalize();
  return r;
}

double to_double(const Rational& q) { return q.get_d(); }

std::size_t hash_rational(const Rational& q) {
  const auto* num = q.get_num_mpz_t();
  const auto* den = q.get_den_mpz_t();
  std::size_t h = static_cast<std::size_t>(mpz_getlimbn(num, 0));
  h = h * 1000003u ^ static_cast<std::size_t>(mpz_size(num)) ^ static_cast<std::size_t>(mpz_sgn(num) + 1);
  h = h * 1000003u ^ static_cast<std::size_t>(mpz_getlimbn(den, 0));
  return h;
}

}  // namespace pdesym
