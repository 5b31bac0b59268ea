#include "pdesym/canonical.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "pdesym/errors.hpp"
#include "pdesym/format.hpp"

namespace pdesym::cas {

namespace {

constexpr long kMaxIntegerPower = 256;
constexpr std::size_t kGcdTermLimit = 600;

int cmp_gen(const Gen& a, const Gen& b) {
  if (a == b) return 0;
  int c = a->key.compare(b->key);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int sign_of(int v) { return v < 0 ? -1 : (v > 0 ? 1 : 0); }

std::string kernel_tag(GenKind kind, int root_index) {
  switch (kind) {
    case GenKind::Log: return "{log";
    case GenKind::Sin: return "{sin";
    case GenKind::Cos: return "{cos";
    case GenKind::Root: return "{root" + std::to_string(root_index);
    case GenKind::Exp: return "{exp";
    case GenKind::FreeExp: return "{E";
    case GenKind::Symbol: break;
  }
  return "{?";
}

Gen make_kernel(GenKind kind, const RatFunc& arg, int root_index = 0) {
  auto g = std::make_shared<Generator>();
  g->kind = kind;
  g->root_index = root_index;
  g->arg = std::make_shared<const RatFunc>(arg);
  g->key = kernel_tag(kind, root_index) + "(" + format(to_expr(arg)) + ")";
  return g;
}

RatFunc gen_value(const Gen& g) { return from_poly(Poly::symbol(g)); }

}  // namespace

Gen make_symbol(const std::string& name, bool is_variable) {
  auto g = std::make_shared<Generator>();
  g->kind = GenKind::Symbol;
  g->key = name;
  g->symbol = name;
  g->is_variable = is_variable;
  return g;
}

// ---------------------------------------------------------------------------
// Monomials

int Monomial::degree() const {
  int d = 0;
  for (const auto& f : factors) d += f.second;
  return d;
}

int compare(const Monomial& a, const Monomial& b) {
  int da = a.degree();
  int db = b.degree();
  if (da != db) return da > db ? 1 : -1;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.factors.size() && j < b.factors.size()) {
    int c = cmp_gen(a.factors[i].first, b.factors[j].first);
    if (c == 0) {
      if (a.factors[i].second != b.factors[j].second) return a.factors[i].second > b.factors[j].second ? 1 : -1;
      ++i;
      ++j;
    } else {
      return c < 0 ? 1 : -1;
    }
  }
  if (i < a.factors.size()) return 1;
  if (j < b.factors.size()) return -1;
  if (!a.exp && !b.exp) return 0;
  if (!a.exp) return -1;
  if (!b.exp) return 1;
  return compare(*a.exp, *b.exp);
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.factors.reserve(a.factors.size() + b.factors.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.factors.size() || j < b.factors.size()) {
    if (j == b.factors.size()) {
      out.factors.push_back(a.factors[i++]);
    } else if (i == a.factors.size()) {
      out.factors.push_back(b.factors[j++]);
    } else {
      int c = cmp_gen(a.factors[i].first, b.factors[j].first);
      if (c == 0) {
        out.factors.emplace_back(a.factors[i].first, a.factors[i].second + b.factors[j].second);
        ++i;
        ++j;
      } else if (c < 0) {
        out.factors.push_back(a.factors[i++]);
      } else {
        out.factors.push_back(b.factors[j++]);
      }
    }
  }
  if (a.exp && b.exp) {
    Poly sum = *a.exp + *b.exp;
    if (!sum.is_zero()) out.exp = std::make_shared<const Poly>(std::move(sum));
  } else {
    out.exp = a.exp ? a.exp : b.exp;
  }
  return out;
}

namespace {

std::optional<Monomial> divide(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0;
  for (const auto& [g, k] : b.factors) {
    while (i < a.factors.size() && cmp_gen(a.factors[i].first, g) < 0) out.factors.push_back(a.factors[i++]);
    if (i == a.factors.size() || cmp_gen(a.factors[i].first, g) != 0 || a.factors[i].second < k) return std::nullopt;
    if (a.factors[i].second > k) out.factors.emplace_back(g, a.factors[i].second - k);
    ++i;
  }
  while (i < a.factors.size()) out.factors.push_back(a.factors[i++]);
  Poly e;
  if (a.exp) e = *a.exp;
  if (b.exp) e = e - *b.exp;
  if (!e.is_zero()) out.exp = std::make_shared<const Poly>(std::move(e));
  return out;
}

Monomial exp_monomial(const Poly& arg) {
  Monomial m;
  if (!arg.is_zero()) m.exp = std::make_shared<const Poly>(arg);
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Polynomials

Poly Poly::constant(const Rational& c) {
  Poly p;
  if (sgn(c) != 0) p.terms_.push_back({Monomial{}, c});
  return p;
}

Poly Poly::monomial(Monomial m, const Rational& c) {
  Poly p;
  if (sgn(c) != 0) p.terms_.push_back({std::move(m), c});
  return p;
}

Poly Poly::symbol(const Gen& g, int power) {
  Monomial m;
  m.factors.emplace_back(g, power);
  return monomial(std::move(m));
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return compare(a.mono, b.mono) > 0; });
  Poly p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && compare(p.terms_.back().mono, t.mono) == 0) {
      p.terms_.back().coeff += t.coeff;
      if (sgn(p.terms_.back().coeff) == 0) p.terms_.pop_back();
    } else if (sgn(t.coeff) != 0) {
      p.terms_.push_back(std::move(t));
    }
  }
  return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }

Rational Poly::constant_value() const { return terms_.empty() ? Rational(0) : terms_[0].coeff; }

bool Poly::has_exp() const {
  return std::any_of(terms_.begin(), terms_.end(), [](const Term& t) { return static_cast<bool>(t.mono.exp); });
}

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& t : p.terms_) t.coeff = -t.coeff;
  return p;
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly out;
  out.terms_.reserve(a.terms_.size() + b.terms_.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.terms_.size() || j < b.terms_.size()) {
    if (j == b.terms_.size()) {
      out.terms_.push_back(a.terms_[i++]);
    } else if (i == a.terms_.size()) {
      out.terms_.push_back(b.terms_[j++]);
    } else {
      int c = compare(a.terms_[i].mono, b.terms_[j].mono);
      if (c > 0) {
        out.terms_.push_back(a.terms_[i++]);
      } else if (c < 0) {
        out.terms_.push_back(b.terms_[j++]);
      } else {
        Rational s = a.terms_[i].coeff + b.terms_[j].coeff;
        if (sgn(s) != 0) out.terms_.push_back({a.terms_[i].mono, s});
        ++i;
        ++j;
      }
    }
  }
  return out;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.is_constant()) return b.scaled(a.constant_value());
  if (b.is_constant()) return a.scaled(b.constant_value());
  std::vector<Term> terms;
  terms.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) terms.push_back({x.mono * y.mono, x.coeff * y.coeff});
  return Poly::from_terms(std::move(terms));
}

Poly Poly::scaled(const Rational& c) const {
  if (sgn(c) == 0) return {};
  Poly p = *this;
  for (auto& t : p.terms_) t.coeff *= c;
  return p;
}

Poly Poly::times(const Monomial& m, const Rational& c) const {
  if (sgn(c) == 0) return {};
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& t : terms_) terms.push_back({t.mono * m, t.coeff * c});
  return Poly::from_terms(std::move(terms));
}

int compare(const Poly& a, const Poly& b) {
  std::size_t n = std::min(a.terms_.size(), b.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = compare(a.terms_[i].mono, b.terms_[i].mono);
    if (c != 0) return c;
    int k = cmp(a.terms_[i].coeff, b.terms_[i].coeff);
    if (k != 0) return sign_of(k);
  }
  if (a.terms_.size() == b.terms_.size()) return 0;
  return a.terms_.size() > b.terms_.size() ? 1 : -1;
}

std::set<std::string> symbols_of(const Poly& p) {
  std::set<std::string> out;
  for (const auto& t : p.terms()) {
    for (const auto& [g, k] : t.mono.factors) {
      if (g->kind == GenKind::Symbol) {
        out.insert(g->symbol);
      } else if (g->arg) {
        auto inner = symbols_of(*g->arg);
        out.insert(inner.begin(), inner.end());
      } else if (g->exp_arg) {
        auto inner = symbols_of(*g->exp_arg);
        out.insert(inner.begin(), inner.end());
      }
    }
    if (t.mono.exp) {
      auto inner = symbols_of(*t.mono.exp);
      out.insert(inner.begin(), inner.end());
    }
  }
  return out;
}

std::set<std::string> symbols_of(const RatFunc& r) {
  auto out = symbols_of(r.num);
  auto d = symbols_of(r.den);
  out.insert(d.begin(), d.end());
  return out;
}

namespace {

bool mentions(const Poly& p, const std::string& var);

bool mentions(const Gen& g, const std::string& var) {
  if (g->kind == GenKind::Symbol) return g->symbol == var;
  if (g->arg) return mentions(g->arg->num, var) || mentions(g->arg->den, var);
  if (g->exp_arg) return mentions(*g->exp_arg, var);
  return false;
}

bool mentions(const Poly& p, const std::string& var) {
  for (const auto& t : p.terms()) {
    for (const auto& f : t.mono.factors)
      if (mentions(f.first, var)) return true;
    if (t.mono.exp && mentions(*t.mono.exp, var)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Multivariate gcd over Q on exponential-free polynomials.

struct GcdAbort {};

std::vector<Gen> gens_of(const Poly& p) {
  std::vector<Gen> out;
  for (const auto& t : p.terms())
    for (const auto& f : t.mono.factors) out.push_back(f.first);
  std::sort(out.begin(), out.end(), [](const Gen& a, const Gen& b) { return cmp_gen(a, b) < 0; });
  out.erase(std::unique(out.begin(), out.end(), [](const Gen& a, const Gen& b) { return cmp_gen(a, b) == 0; }),
            out.end());
  return out;
}

int degree_in(const Poly& p, const Gen& v) {
  int d = 0;
  for (const auto& t : p.terms())
    for (const auto& f : t.mono.factors)
      if (cmp_gen(f.first, v) == 0) d = std::max(d, f.second);
  return d;
}

std::map<int, Poly> coefficients_in(const Poly& p, const Gen& v) {
  std::map<int, std::vector<Term>> buckets;
  for (const auto& t : p.terms()) {
    Term stripped{Monomial{}, t.coeff};
    stripped.mono.exp = t.mono.exp;
    int k = 0;
    for (const auto& f : t.mono.factors) {
      if (cmp_gen(f.first, v) == 0) {
        k = f.second;
      } else {
        stripped.mono.factors.push_back(f);
      }
    }
    buckets[k].push_back(std::move(stripped));
  }
  std::map<int, Poly> out;
  for (auto& [k, terms] : buckets) out[k] = Poly::from_terms(std::move(terms));
  return out;
}

Monomial power_of(const Gen& v, int k) {
  Monomial m;
  if (k > 0) m.factors.emplace_back(v, k);
  return m;
}

Poly monic(const Poly& p) {
  if (p.is_zero()) return p;
  return p.scaled(Rational(1) / p.leading().coeff);
}

// Largest monomial dividing every term (ignores exponentials).
Monomial monomial_content(const Poly& p) {
  Monomial out;
  bool first = true;
  for (const auto& t : p.terms()) {
    if (first) {
      out.factors = t.mono.factors;
      first = false;
      continue;
    }
    std::vector<std::pair<Gen, int>> kept;
    std::size_t j = 0;
    for (const auto& [g, k] : out.factors) {
      while (j < t.mono.factors.size() && cmp_gen(t.mono.factors[j].first, g) < 0) ++j;
      if (j < t.mono.factors.size() && cmp_gen(t.mono.factors[j].first, g) == 0)
        kept.emplace_back(g, std::min(k, t.mono.factors[j].second));
    }
    out.factors = std::move(kept);
    if (out.factors.empty()) break;
  }
  return out;
}

Monomial monomial_min(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t j = 0;
  for (const auto& [g, k] : a.factors) {
    while (j < b.factors.size() && cmp_gen(b.factors[j].first, g) < 0) ++j;
    if (j < b.factors.size() && cmp_gen(b.factors[j].first, g) == 0) out.factors.emplace_back(g, std::min(k, b.factors[j].second));
  }
  return out;
}

Poly divide_by_monomial(const Poly& p, const Monomial& m) {
  if (m.is_one()) return p;
  std::vector<Term> terms;
  for (const auto& t : p.terms()) terms.push_back({*divide(t.mono, m), t.coeff});
  return Poly::from_terms(std::move(terms));
}

void check_size(const Poly& p) {
  if (p.size() > kGcdTermLimit) throw GcdAbort{};
}

Poly gcd_impl(const Poly& a, const Poly& b, int depth);

Poly content_in(const Poly& p, const Gen& v, int depth) {
  auto coeffs = coefficients_in(p, v);
  Poly g;
  for (const auto& [k, c] : coeffs) {
    g = gcd_impl(g, c, depth + 1);
    if (g.is_constant() && !g.is_zero()) return Poly::constant(1);
  }
  return g;
}

Poly exact_or_abort(const Poly& a, const Poly& b) {
  auto q = divide_exact(a, b);
  if (!q) throw GcdAbort{};
  return *q;
}

Poly primitive_in(const Poly& p, const Gen& v, int depth) {
  if (p.is_zero()) return p;
  Poly c = content_in(p, v, depth);
  if (c.is_constant()) return monic(p);
  return monic(exact_or_abort(p, c));
}

Poly pseudo_remainder(const Poly& a, const Poly& b, const Gen& v) {
  int db = degree_in(b, v);
  Poly lcb = coefficients_in(b, v).at(db);
  Poly r = a;
  for (int guard = 0; !r.is_zero(); ++guard) {
    int dr = degree_in(r, v);
    if (dr < db) break;
    if (guard > 64) throw GcdAbort{};
    Poly lcr = coefficients_in(r, v).at(dr);
    r = r * lcb - (lcr * b).times(power_of(v, dr - db));
    check_size(r);
  }
  return r;
}

Poly gcd_impl(const Poly& a, const Poly& b, int depth) {
  if (depth > 24) throw GcdAbort{};
  if (a.is_zero()) return monic(b);
  if (b.is_zero()) return monic(a);
  if (a.is_constant() || b.is_constant()) return Poly::constant(1);
  check_size(a);
  check_size(b);

  Monomial ma = monomial_content(a);
  Monomial mb = monomial_content(b);
  Poly common = Poly::monomial(monomial_min(ma, mb));
  Poly pa = divide_by_monomial(a, ma);
  Poly pb = divide_by_monomial(b, mb);
  if (pa.is_constant() || pb.is_constant()) return common;

  auto ga = gens_of(pa);
  auto gb = gens_of(pb);
  std::vector<Gen> shared;
  std::set_intersection(ga.begin(), ga.end(), gb.begin(), gb.end(), std::back_inserter(shared),
                        [](const Gen& x, const Gen& y) { return cmp_gen(x, y) < 0; });
  if (shared.empty()) return common;

  const Gen& v = shared.front();
  Poly ca = content_in(pa, v, depth);
  Poly cb = content_in(pb, v, depth);
  Poly cg = gcd_impl(ca, cb, depth + 1);
  Poly x = ca.is_constant() ? pa : exact_or_abort(pa, ca);
  Poly y = cb.is_constant() ? pb : exact_or_abort(pb, cb);
  if (degree_in(x, v) < degree_in(y, v)) std::swap(x, y);

  while (!y.is_zero() && degree_in(y, v) > 0) {
    Poly r = pseudo_remainder(x, y, v);
    x = std::move(y);
    y = primitive_in(r, v, depth);
  }
  Poly pg = y.is_zero() ? primitive_in(x, v, depth) : Poly::constant(1);
  return monic(common * cg * pg);
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
  try {
    return gcd_impl(a, b, 0);
  } catch (const GcdAbort&) {
    return Poly::constant(1);
  }
}

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
  if (b.is_zero()) return std::nullopt;
  if (b.is_constant()) return a.scaled(Rational(1) / b.constant_value());
  Poly r = a;
  std::vector<Term> quotient;
  const Term& lb = b.leading();
  std::size_t guard = 0;
  const std::size_t max_steps = 64 + 8 * (a.size() + 1) * (b.size() + 1);
  while (!r.is_zero()) {
    if (++guard > max_steps) return std::nullopt;
    const Term& lr = r.leading();
    auto m = divide(lr.mono, lb.mono);
    if (!m) return std::nullopt;
    Rational c = lr.coeff / lb.coeff;
    quotient.push_back({*m, c});
    r = r - b.times(*m, c);
  }
  return Poly::from_terms(std::move(quotient));
}

std::optional<Poly> sqrt_exact(const Poly& p) {
  if (p.is_zero()) return Poly();
  const Term& lead = p.leading();
  auto c = exact_sqrt(lead.coeff);
  if (!c) return std::nullopt;
  Monomial m;
  for (const auto& [g, k] : lead.mono.factors) {
    if (k % 2 != 0) return std::nullopt;
    m.factors.emplace_back(g, k / 2);
  }
  if (lead.mono.exp) m.exp = std::make_shared<const Poly>(lead.mono.exp->scaled(Rational(1, 2)));
  Poly root = Poly::monomial(m, *c);
  Term first = root.leading();
  for (std::size_t guard = 0; guard < p.size() + 4; ++guard) {
    Poly rem = p - root * root;
    if (rem.is_zero()) return root;
    const Term& lr = rem.leading();
    auto q = divide(lr.mono, first.mono);
    if (!q) return std::nullopt;
    Poly next = root + Poly::monomial(*q, lr.coeff / (2 * first.coeff));
    if (next == root) return std::nullopt;
    root = std::move(next);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rational functions

Rational RatFunc::constant_value() const { return num.constant_value() / den.constant_value(); }

namespace {

bool reducible(const Monomial& m) {
  for (const auto& [g, k] : m.factors) {
    if (g->kind == GenKind::Cos && k >= 2) return true;
    if (g->kind == GenKind::Root && k >= g->root_index) return true;
  }
  return false;
}

// Rewrites cos^2 -> 1 - sin^2 and root_q(r)^q -> r. nullopt when nothing applies.
std::optional<RatFunc> reduce_kernels(const Poly& p) {
  bool any = false;
  for (const auto& t : p.terms()) any = any || reducible(t.mono);
  if (!any) return std::nullopt;

  std::vector<Term> plain;
  RatFunc acc;
  for (const auto& t : p.terms()) {
    if (!reducible(t.mono)) {
      plain.push_back(t);
      continue;
    }
    Monomial rest;
    rest.exp = t.mono.exp;
    RatFunc factor = from_poly(Poly::constant(t.coeff));
    for (const auto& [g, k] : t.mono.factors) {
      if (g->kind == GenKind::Cos && k >= 2) {
        if (k % 2) rest.factors.emplace_back(g, 1);
        RatFunc s = make_sin(*g->arg);
        factor = factor * pow(from_poly(Poly::constant(1)) - s * s, k / 2);
      } else if (g->kind == GenKind::Root && k >= g->root_index) {
        if (k % g->root_index) rest.factors.emplace_back(g, k % g->root_index);
        factor = factor * pow(*g->arg, k / g->root_index);
      } else {
        rest.factors.emplace_back(g, k);
      }
    }
    acc = acc + from_poly(Poly::monomial(rest)) * factor;
  }
  return acc + from_poly(Poly::from_terms(std::move(plain)));
}

// Multiplies numerator and denominator by exp(-E), E the smallest exponent among the
// denominator terms. Polynomials are ordered by the sign of the leading coefficient of
// their difference; that order is translation invariant, so after the shift the
// smallest exponent is 0 and a second pass changes nothing.
void normalize_exp_unit(Poly& num, Poly& den) {
  const Poly* low = nullptr;
  Poly zero;
  for (const auto& t : den.terms()) {
    const Poly& e = t.mono.exp ? *t.mono.exp : zero;
    if (!low) {
      low = &e;
      continue;
    }
    Poly d = e - *low;
    if (!d.is_zero() && sgn(d.leading().coeff) < 0) low = &e;
  }
  if (!low || low->is_zero()) return;
  Monomial inv = exp_monomial(-*low);
  num = num.times(inv);
  den = den.times(inv);
}

void remove_common_monomial(Poly& num, Poly& den) {
  Monomial m = monomial_min(monomial_content(num), monomial_content(den));
  if (m.is_one()) return;
  num = divide_by_monomial(num, m);
  den = divide_by_monomial(den, m);
}

// Moves exponential factors into an ordinary polynomial ring for gcd. Every monomial
// m of an exponent gets one indeterminate X_m = exp(m/d), d the lcm of the
// denominators of its coefficients, so exp(E) becomes a product of integer powers.
// Negative powers are cleared by one common shift of numerator and denominator.
// Substituting back is a ring homomorphism, hence common factors found this way
// are genuine.
class FreeExpMap {
 public:
  FreeExpMap(const Poly& num, const Poly& den) {
    for (const Poly* p : {&num, &den})
      for (const auto& t : p->terms())
        if (t.mono.exp)
          for (const auto& u : t.mono.exp->terms()) {
            Slot& s = slot(u.mono);
            mpz_lcm(s.den.get_mpz_t(), s.den.get_mpz_t(), u.coeff.get_den_mpz_t());
          }
    for (auto& s : slots_) {
      auto g = std::make_shared<Generator>();
      g->kind = GenKind::FreeExp;
      g->exp_arg = std::make_shared<const Poly>(Poly::monomial(s.mono, Rational(1) / Rational(s.den)));
      g->key = "{E(" + format(to_expr(*g->exp_arg)) + ")";
      s.atom = g;
    }
    for (const Poly* p : {&num, &den})
      for (const auto& t : p->terms())
        if (t.mono.exp)
          for (const auto& u : t.mono.exp->terms()) {
            Slot& s = slot(u.mono);
            s.low = std::min(s.low, power(s, u.coeff));
          }
  }

  Poly to_free(const Poly& p) {
    std::vector<Term> terms;
    for (const auto& t : p.terms()) {
      Term u{Monomial{}, t.coeff};
      u.mono.factors = t.mono.factors;
      std::map<const Slot*, long> powers;
      for (auto& s : slots_) powers[&s] = -s.low;
      if (t.mono.exp)
        for (const auto& e : t.mono.exp->terms()) {
          Slot& s = slot(e.mono);
          powers[&s] += power(s, e.coeff);
        }
      for (const auto& [s, k] : powers)
        if (k > 0) u.mono = u.mono * power_of(s->atom, static_cast<int>(k));
      terms.push_back(std::move(u));
    }
    return Poly::from_terms(std::move(terms));
  }

  Poly from_free(const Poly& p) const {
    std::vector<Term> terms;
    for (const auto& t : p.terms()) {
      Term u{Monomial{}, t.coeff};
      Poly e;
      for (const auto& [g, k] : t.mono.factors) {
        if (g->kind == GenKind::FreeExp) {
          e = e + g->exp_arg->scaled(k);
        } else {
          u.mono.factors.emplace_back(g, k);
        }
      }
      if (!e.is_zero()) u.mono.exp = std::make_shared<const Poly>(std::move(e));
      terms.push_back(std::move(u));
    }
    return Poly::from_terms(std::move(terms));
  }

 private:
  struct Slot {
    Monomial mono;
    mpz_class den = 1;
    long low = 0;
    Gen atom;
  };

  Slot& slot(const Monomial& m) {
    for (auto& s : slots_)
      if (compare(s.mono, m) == 0) return s;
    slots_.push_back(Slot{m, 1, 0, nullptr});
    return slots_.back();
  }

  static long power(const Slot& s, const Rational& c) {
    Rational k = c * Rational(s.den);
    return k.get_num().get_si();
  }

  std::deque<Slot> slots_;  // stable addresses
};

RatFunc finish_constant_den(const Poly& num, const Poly& den) {
  return RatFunc{num.scaled(Rational(1) / den.constant_value()), Poly::constant(1)};
}

}  // namespace

RatFunc make_ratfunc(Poly num, Poly den) {
  if (den.is_zero()) throw DomainError("division by zero");
  auto rn = reduce_kernels(num);
  auto rd = reduce_kernels(den);
  if (rn || rd) {
    RatFunc n = rn ? *rn : make_ratfunc(std::move(num), Poly::constant(1));
    RatFunc d = rd ? *rd : make_ratfunc(std::move(den), Poly::constant(1));
    return n / d;
  }
  if (num.is_zero()) return RatFunc{};
  if (den.is_constant()) return finish_constant_den(num, den);

  normalize_exp_unit(num, den);
  remove_common_monomial(num, den);
  if (den.is_constant()) return finish_constant_den(num, den);

  // x/sqrt(x) -> sqrt(x): a root dividing the whole denominator is raised to its
  // index, and a cos to its square, so the kernel rewrites apply there as well.
  Monomial lift;
  for (const auto& [g, k] : monomial_content(den).factors) {
    if (g->kind == GenKind::Root) lift.factors.emplace_back(g, g->root_index - k);
    if (g->kind == GenKind::Cos) lift.factors.emplace_back(g, 1);
  }
  if (!lift.is_one()) return make_ratfunc(num.times(lift), den.times(lift));

  if (!num.is_constant() && den.size() > 1) {
    FreeExpMap map(num, den);
    Poly fn = map.to_free(num);
    Poly fd = map.to_free(den);
    Poly g = gcd(fn, fd);
    if (!g.is_constant()) {
      auto qn = divide_exact(fn, g);
      auto qd = divide_exact(fd, g);
      if (qn && qd) {
        num = map.from_free(*qn);
        den = map.from_free(*qd);
        normalize_exp_unit(num, den);
        remove_common_monomial(num, den);
        if (den.is_constant()) return finish_constant_den(num, den);
      }
    }
  }
  Rational lc = den.leading().coeff;
  if (lc != 1) {
    num = num.scaled(Rational(1) / lc);
    den = den.scaled(Rational(1) / lc);
  }
  return RatFunc{std::move(num), std::move(den)};
}

RatFunc from_poly(Poly p) { return make_ratfunc(std::move(p), Poly::constant(1)); }

RatFunc operator+(const RatFunc& a, const RatFunc& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den == b.den) {
    if (a.den.is_constant()) return from_poly(a.num + b.num);
    return make_ratfunc(a.num + b.num, a.den);
  }
  return make_ratfunc(a.num * b.den + b.num * a.den, a.den * b.den);
}

RatFunc operator-(const RatFunc& a) { return RatFunc{-a.num, a.den}; }

RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }

RatFunc operator*(const RatFunc& a, const RatFunc& b) {
  if (a.is_zero() || b.is_zero()) return RatFunc{};
  if (a.is_polynomial() && b.is_polynomial()) return from_poly(a.num * b.num);
  return make_ratfunc(a.num * b.num, a.den * b.den);
}

RatFunc operator/(const RatFunc& a, const RatFunc& b) {
  if (b.is_zero()) throw DomainError("division by zero");
  return make_ratfunc(a.num * b.den, a.den * b.num);
}

RatFunc pow(const RatFunc& base, long exponent) {
  if (exponent == 0) return from_poly(Poly::constant(1));
  if (exponent < 0) {
    if (base.is_zero()) throw DomainError("zero raised to a negative power");
    return pow(make_ratfunc(base.den, base.num), -exponent);
  }
  RatFunc result = from_poly(Poly::constant(1));
  RatFunc b = base;
  long e = exponent;
  while (e > 0) {
    if (e & 1) result = result * b;
    e >>= 1;
    if (e > 0) b = b * b;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Kernels

RatFunc make_exp(const RatFunc& arg) {
  if (!arg.is_polynomial()) return gen_value(make_kernel(GenKind::Exp, arg));
  // exp(k*log(r)) with integer k is pulled out as r^k.
  RatFunc factor = from_poly(Poly::constant(1));
  std::vector<Term> rest;
  for (const auto& t : arg.num.terms()) {
    const auto& f = t.mono.factors;
    if (!t.mono.exp && f.size() == 1 && f[0].first->kind == GenKind::Log && f[0].second == 1 && is_integer(t.coeff) &&
        abs(t.coeff) <= kMaxIntegerPower) {
      factor = factor * pow(*f[0].first->arg, t.coeff.get_num().get_si());
    } else {
      rest.push_back(t);
    }
  }
  Poly e = Poly::from_terms(std::move(rest));
  return factor * from_poly(Poly::monomial(exp_monomial(e)));
}

RatFunc make_log(const RatFunc& arg) {
  if (arg.is_zero()) throw DomainError("log of zero");
  if (arg.is_constant()) {
    Rational c = arg.constant_value();
    if (c == 1) return RatFunc{};
    if (sgn(c) < 0) throw DomainError("log of a negative constant");
    return gen_value(make_kernel(GenKind::Log, arg));
  }
  if (arg.is_polynomial() && arg.num.size() == 1) {
    const Term& t = arg.num.leading();
    if (t.mono.factors.empty() && t.mono.exp && sgn(t.coeff) > 0) {
      RatFunc e = from_poly(*t.mono.exp);
      if (t.coeff == 1) return e;
      return e + make_log(from_poly(Poly::constant(t.coeff)));
    }
  }
  return gen_value(make_kernel(GenKind::Log, arg));
}

RatFunc make_sin(const RatFunc& arg) {
  if (arg.is_zero()) return RatFunc{};
  if (sgn(arg.num.leading().coeff) < 0) return -gen_value(make_kernel(GenKind::Sin, -arg));
  return gen_value(make_kernel(GenKind::Sin, arg));
}

RatFunc make_cos(const RatFunc& arg) {
  if (arg.is_zero()) return from_poly(Poly::constant(1));
  if (sgn(arg.num.leading().coeff) < 0) return gen_value(make_kernel(GenKind::Cos, -arg));
  return gen_value(make_kernel(GenKind::Cos, arg));
}

RatFunc make_root(const RatFunc& arg, int index) {
  if (index == 1) return arg;
  if (arg.is_zero()) return RatFunc{};
  if (arg.is_constant()) {
    Rational c = arg.constant_value();
    if (sgn(c) < 0 && index % 2 == 0) throw DomainError("even root of a negative constant");
    if (sgn(c) > 0) {
      mpz_class n = c.get_num();
      mpz_class d = c.get_den();
      mpz_class rn;
      mpz_class rd;
      bool exact_n = mpz_root(rn.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(index)) != 0;
      bool exact_d = mpz_root(rd.get_mpz_t(), d.get_mpz_t(), static_cast<unsigned long>(index)) != 0;
      if (exact_n && exact_d) return from_poly(Poly::constant(Rational(rn, rd)));
    }
  }
  return gen_value(make_kernel(GenKind::Root, arg, index));
}

// ---------------------------------------------------------------------------
// Expr <-> canonical form

RatFunc apply_unary(UnaryOp op, const RatFunc& c) {
  switch (op) {
    case UnaryOp::Neg: return -c;
    case UnaryOp::Exp: return make_exp(c);
    case UnaryOp::Log: return make_log(c);
    case UnaryOp::Sin: return make_sin(c);
    case UnaryOp::Cos: return make_cos(c);
    case UnaryOp::Sqrt: return make_root(c, 2);
  }
  throw UnsupportedFunction("unsupported unary operator");
}

RatFunc apply_binary(BinaryOp op, const RatFunc& l, const RatFunc& r) {
  switch (op) {
    case BinaryOp::Add: return l + r;
    case BinaryOp::Sub: return l - r;
    case BinaryOp::Mul: return l * r;
    case BinaryOp::Div: return l / r;
    case BinaryOp::Pow: {
      if (r.is_constant()) {
        Rational q = r.constant_value();
        mpz_class p = q.get_num();
        mpz_class d = q.get_den();
        if (abs(p) <= kMaxIntegerPower && d <= kMaxIntegerPower) {
          RatFunc base = d == 1 ? l : make_root(l, static_cast<int>(d.get_si()));
          return pow(base, p.get_si());
        }
      }
      return make_exp(r * make_log(l));
    }
  }
  throw UnsupportedFunction("unsupported binary operator");
}

RatFunc canonicalize(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Const: return from_poly(Poly::constant(e.value()));
    case NodeKind::Var: return from_poly(Poly::symbol(make_symbol(e.name(), true)));
    case NodeKind::Param: return from_poly(Poly::symbol(make_symbol(e.name(), false)));
    case NodeKind::Deriv:
    case NodeKind::Diff: throw UnsupportedFunction("derivative atom '" + format(e) + "' in a concrete expression");
    case NodeKind::Unary: return apply_unary(e.unary_op(), canonicalize(e.child()));
    case NodeKind::Binary: return apply_binary(e.binary_op(), canonicalize(e.lhs()), canonicalize(e.rhs()));
  }
  throw UnsupportedFunction("unsupported expression node");
}

Expr to_expr(const Gen& g) {
  switch (g->kind) {
    case GenKind::Symbol: return g->is_variable ? Expr::var(g->symbol) : Expr::param(g->symbol);
    case GenKind::Log: return log(to_expr(*g->arg));
    case GenKind::Sin: return sin(to_expr(*g->arg));
    case GenKind::Cos: return cos(to_expr(*g->arg));
    case GenKind::Exp: return exp(to_expr(*g->arg));
    case GenKind::Root:
      if (g->root_index == 2) return sqrt(to_expr(*g->arg));
      return pow(to_expr(*g->arg), Expr::constant(Rational(1, g->root_index)));
    case GenKind::FreeExp: return exp(to_expr(*g->exp_arg));
  }
  return {};
}

namespace {

std::optional<Expr> monomial_expr(const Monomial& m) {
  std::optional<Expr> out;
  auto push = [&](Expr f) { out = out ? *out * f : f; };
  for (const auto& [g, k] : m.factors) push(k == 1 ? to_expr(g) : pow(to_expr(g), Expr::constant(k)));
  if (m.exp) push(exp(to_expr(*m.exp)));
  return out;
}

}  // namespace

Expr to_expr(const Poly& p) {
  if (p.is_zero()) return Expr::constant(0);
  std::optional<Expr> acc;
  for (const auto& t : p.terms()) {
    auto body = monomial_expr(t.mono);
    if (!acc) {
      if (!body) {
        acc = Expr::constant(t.coeff);
      } else if (t.coeff == 1) {
        acc = *body;
      } else if (t.coeff == -1) {
        acc = -*body;
      } else {
        acc = Expr::constant(t.coeff) * *body;
      }
      continue;
    }
    Rational mag = abs(t.coeff);
    Expr piece = !body ? Expr::constant(mag) : (mag == 1 ? *body : Expr::constant(mag) * *body);
    acc = sgn(t.coeff) < 0 ? *acc - piece : *acc + piece;
  }
  return *acc;
}

Expr to_expr(const RatFunc& r) {
  if (r.den.is_constant()) return to_expr(r.num.scaled(Rational(1) / r.den.constant_value()));
  return to_expr(r.num) / to_expr(r.den);
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

RatFunc derivative_of_gen(const Gen& g, const std::string& var) {
  if (g->kind == GenKind::Symbol) return from_poly(Poly::constant(g->symbol == var ? 1 : 0));
  const RatFunc& arg = *g->arg;
  RatFunc inner = differentiate(arg, var);
  if (inner.is_zero()) return RatFunc{};
  switch (g->kind) {
    case GenKind::Log: return inner / arg;
    case GenKind::Sin: return make_cos(arg) * inner;
    case GenKind::Cos: return -(make_sin(arg) * inner);
    case GenKind::Exp: return gen_value(g) * inner;
    case GenKind::Root: return gen_value(g) * inner / (arg * from_poly(Poly::constant(g->root_index)));
    default: throw UnsupportedFunction("cannot differentiate internal generator");
  }
}

RatFunc differentiate_poly(const Poly& p, const std::string& var) {
  std::vector<Term> plain;
  RatFunc extra;
  for (const auto& t : p.terms()) {
    for (std::size_t i = 0; i < t.mono.factors.size(); ++i) {
      const auto& [g, k] = t.mono.factors[i];
      if (!mentions(g, var)) continue;
      Monomial rest = t.mono;
      if (k == 1) {
        rest.factors.erase(rest.factors.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        rest.factors[i].second = k - 1;
      }
      Rational c = t.coeff * k;
      if (g->kind == GenKind::Symbol) {
        plain.push_back({std::move(rest), c});
      } else {
        extra = extra + from_poly(Poly::monomial(std::move(rest), c)) * derivative_of_gen(g, var);
      }
    }
    if (t.mono.exp && mentions(*t.mono.exp, var)) {
      RatFunc de = differentiate_poly(*t.mono.exp, var);
      if (de.is_polynomial()) {
        Poly scaled = de.num.scaled(Rational(1) / de.den.constant_value());
        for (const auto& u : scaled.terms())
          plain.push_back({t.mono * u.mono, t.coeff * u.coeff});
      } else {
        extra = extra + from_poly(Poly::monomial(t.mono, t.coeff)) * de;
      }
    }
  }
  return from_poly(Poly::from_terms(std::move(plain))) + extra;
}

}  // namespace

RatFunc differentiate(const RatFunc& r, const std::string& var) {
  if (r.is_polynomial()) {
    RatFunc d = differentiate_poly(r.num, var);
    return r.den.constant_value() == 1 ? d : d * from_poly(Poly::constant(Rational(1) / r.den.constant_value()));
  }
  RatFunc dn = differentiate_poly(r.num, var);
  RatFunc dd = differentiate_poly(r.den, var);
  RatFunc n = from_poly(r.num);
  RatFunc d = from_poly(r.den);
  return (dn * d - n * dd) / (d * d);
}

}  // namespace pdesym::cas
