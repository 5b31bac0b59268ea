#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pdesym/canonical.hpp"
#include "pdesym/expr.hpp"

namespace pdesym {

// Canonical form rendered back as a tree. Falls back to fold_constants(e) when the
// expression cannot be canonicalized (derivative atoms, literal division by zero).
Expr simplify(const Expr& e);

enum class ZeroKind : std::uint8_t { CertifiedZero, WitnessNonzero, Undecided };

struct ZeroVerdict {
  ZeroKind kind = ZeroKind::Undecided;
  std::map<std::string, double> point;  // WitnessNonzero only
  double value = 0.0;

  bool certified() const { return kind == ZeroKind::CertifiedZero; }
};

const char* to_string(ZeroKind k);

// CertifiedZero only from exact canonicalization; otherwise up to 64 random points
// drawn from +-[0.3, 2.7] look for |value| > 1e-6.
ZeroVerdict zero_certificate(const Expr& e, std::uint64_t seed = 1);

// Numeric witness search alone, used for rejection.
ZeroVerdict numeric_witness(const Expr& e, std::uint64_t seed, int points = 64);

struct SolveLimits {
  std::size_t max_unknowns = 3;
  int max_degree = 2;
  std::size_t max_solutions = 8;
  std::size_t max_steps = 256;
};

using Assignment = std::map<std::string, Expr>;

// Undetermined coefficients. The numerator of `r` is split by monomials over the
// basis (variables, the symbols in `basis_symbols`, kernels depending on either,
// exponential factors); every coefficient, a polynomial in `unknowns`, must vanish.
// Linear elimination plus roots of univariate quadratics with a perfect-square
// discriminant. Unknowns left undetermined are absent from the assignments.
// Candidates are not post-checked here.
std::vector<Assignment> solve_identically_zero(const cas::RatFunc& r, const std::vector<std::string>& unknowns,
                                               const std::set<std::string>& basis_symbols = {},
                                               const SolveLimits& limits = {});

// Assignment for `fresh` under which `residual` becomes CertifiedZero, or nullopt
// (Unresolvable). Every returned assignment has been re-certified.
std::optional<Assignment> resolve_parameters(const Expr& residual, const std::set<std::string>& fresh,
                                             const SolveLimits& limits = {});

}  // namespace pdesym
