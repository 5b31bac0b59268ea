#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "pdesym/expr.hpp"
#include "pdesym/problem.hpp"
#include "pdesym/simplify.hpp"

namespace pdesym {

struct VerifyOptions {
  // Parameters introduced by the search; solved for when the residual is not zero.
  std::set<std::string> fresh;
  // Parameters standing for constants of the initial condition. Their values are
  // fixed during the ic check; they are solved for only when `fresh` alone fails.
  std::map<std::string, Rational> lifted;
  std::uint64_t seed = 1;
  SolveLimits limits;
};

struct VerificationReport {
  Expr residual_simplified;
  ZeroVerdict pde_verdict;
  bool ic_pass = false;
  Assignment resolved;
  // Reference values under which the candidate reduces to the initial condition.
  std::map<std::string, Rational> refs;
  // Candidate with `resolved` substituted.
  Expr solution;
  int fitness = 1;
};

// PDE check (exact certificate, with parameter resolution) followed by the ic check
// at time 0. Fitness 0 only with a CertifiedZero residual and a certified ic match.
VerificationReport verify_candidate(const PdeProblem& problem, const Expr& candidate, const VerifyOptions& opts = {});

// Time-0 check alone. On success `refs` receives the values used.
bool ic_matches(const PdeProblem& problem, const Expr& candidate, const std::map<std::string, Rational>& fixed,
                std::map<std::string, Rational>* refs = nullptr);

enum class Equivalence : std::uint8_t { Equivalent, Distinct, Undecided };

const char* to_string(Equivalence e);

// Looks for an affine map of the parameters of one expression in terms of the
// parameters of the other (coefficients of the problem stay fixed), in both
// directions. Distinct only when 32 random maps are all separated numerically.
Equivalence check_equivalence(const Expr& a, const Expr& b, const PdeProblem& problem, std::uint64_t seed = 1);

}  // namespace pdesym
