#pragma once

// Candidates m = 1 + q + ... + q^(n-1) for prime powers q = p^e, and the
// filters that reject them before any Miller-Rabin work:
//
//   N_COMPOSITE  n composite; R(q, d) divides m for every d | n.
//   E_PRUNE      e >= 2 and n > e; m = R(p,n) * R(p^n,e) / R(p,e) with both
//                numerator factors exceeding the denominator.
//   Q_CONGRUENT  q = 1 (mod n) forces n | m.
//   TRIAL        for odd prime n and q != 1 (mod n) every prime divisor r of
//                m satisfies r = 1 (mod 2n); only those r are tried.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "projprime/arith.hpp"
#include "projprime/bigint.hpp"

namespace projprime::projective {

struct PrimePower {
  std::uint64_t p = 2;
  unsigned e = 1;
  BigInt q = 2;

  /// Throws DomainError unless p is prime and e >= 1.
  static PrimePower make(std::uint64_t p, unsigned e);
};

/// m = (q^n - 1)/(q - 1).  Requires q >= 2, n >= 1.
BigInt repunit(const BigInt& q, std::uint64_t n);

struct ProjectiveCandidate {
  PrimePower base;
  std::uint64_t n = 2;
  BigInt m;

  /// Throws DomainError if n < 2.
  static ProjectiveCandidate make(const PrimePower& base, std::uint64_t n);
};

enum class Rule { NComposite, EPrune, QCongruent, Trial };

std::string_view rule_name(Rule rule);

struct FilterVerdict {
  std::optional<Rule> rule;  // empty: survives
  BigInt factor;             // nontrivial divisor of m when rule is set
  // E_PRUNE only: m * denominator == numerator_a * numerator_b.
  BigInt numerator_a;
  BigInt numerator_b;
  BigInt denominator;

  bool survives() const { return !rule.has_value(); }
  static FilterVerdict pass() { return {}; }
};

/// Re-checks a CompositeByRule verdict against the candidate.
bool filter_witness_verifies(const ProjectiveCandidate& c, const FilterVerdict& v);

FilterVerdict structural_filter(const ProjectiveCandidate& c);

/// Primes r <= bound with r = 1 (mod 2n), ascending.  Built once per n and
/// shared across every q tested with that exponent.
class AdmissibleDivisors {
 public:
  AdmissibleDivisors(std::uint64_t n, std::uint64_t bound);

  std::uint64_t n() const { return n_; }
  std::uint64_t bound() const { return bound_; }
  std::span<const std::uint64_t> primes() const { return primes_; }

 private:
  std::uint64_t n_;
  std::uint64_t bound_;
  std::vector<std::uint64_t> primes_;
};

inline constexpr std::uint64_t kDefaultTrialBound = 100000;
/// For m < 2^64 the trial stage tries at most this many admissible primes.
inline constexpr std::size_t kWordTrialPrimes = 16;

/// Trial division of m by the admissible primes r < m.  Only the residue
/// q mod r is needed: r | m iff q^n = 1 (mod r) when q != 1 (mod r).
/// Requires n odd prime (DomainError otherwise).
FilterVerdict lemma_trial_division(const ProjectiveCandidate& c, const AdmissibleDivisors& divisors);
FilterVerdict lemma_trial_division(const ProjectiveCandidate& c, std::uint64_t bound);

enum class Stage { Structural, Trial, PrimalityTest };

std::string_view stage_name(Stage stage);

struct Classification {
  arith::Primality primality;
  Stage decided_by = Stage::PrimalityTest;
  FilterVerdict filter;  // set when a filter decided

  bool is_prime() const { return primality.is_prime(); }
};

/// structural_filter -> lemma_trial_division -> arith::is_prime, stopping at
/// the first composite verdict.  `divisors` may be supplied to reuse a
/// per-n table; it must match c.n.
Classification is_projective_prime(const ProjectiveCandidate& c, const arith::WitnessPolicy& policy,
                                   std::uint64_t trial_bound = kDefaultTrialBound,
                                   const AdmissibleDivisors* divisors = nullptr);

}  // namespace projprime::projective
