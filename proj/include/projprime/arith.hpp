#pragma once

// Modular arithmetic and the Miller-Rabin primality engine.
//
// Numbers below the deterministic threshold (2^64 by default) are decided
// exactly with the fixed witness set {2,3,5,...,37}.  Above it, m is first
// trial-divided by the primes below 10^4, then tested with base 2 followed
// by pseudo-random bases drawn from a counter-mode generator keyed on
// (seed, m mod 2^64, round), so repeated runs give identical verdicts.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "projprime/bigint.hpp"

namespace projprime::arith {

/// The deterministic witness set; exact for every m < 3.18 * 10^23.
inline constexpr std::array<std::uint32_t, 12> kDeterministicBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

/// Upper bound of the small-prime trial-division table.
inline constexpr std::uint32_t kSmallPrimeBound = 10000;

struct WitnessPolicy {
  BigInt deterministic_threshold = BigInt(1) << 64;
  unsigned rounds_above_threshold = 40;
  std::uint64_t rng_seed = 0;

  /// Throws DomainError if rounds == 0 or the threshold exceeds the range
  /// for which kDeterministicBases is known to be exact.
  void validate() const;

  /// Stable 64-bit digest of the policy; embedded in checkpoints.
  std::uint64_t digest() const;
};

enum class Verdict { Composite, ProbablePrime, ProvenPrimeSmall };

enum class WitnessKind {
  None,            // m < 2: neither prime nor composite, nothing to certify
  Factor,          // 1 < witness < m and witness | m
  MillerRabinBase  // miller_rabin_round(m, witness) == CompositeCertain
};

struct Primality {
  Verdict verdict = Verdict::Composite;
  WitnessKind witness_kind = WitnessKind::None;
  BigInt witness;
  unsigned rounds = 0;  // Miller-Rabin rounds actually executed

  bool is_prime() const { return verdict != Verdict::Composite; }

  static Primality not_prime() { return {}; }
  static Primality composite_by_factor(BigInt factor) {
    return {Verdict::Composite, WitnessKind::Factor, std::move(factor), 0};
  }
  static Primality composite_by_base(BigInt base, unsigned rounds) {
    return {Verdict::Composite, WitnessKind::MillerRabinBase, std::move(base), rounds};
  }
};

/// Re-checks a Composite verdict against m without trusting the producer.
bool witness_verifies(const BigInt& m, const Primality& verdict);

/// base^exponent mod modulus by left-to-right binary square-and-multiply.
/// Throws DomainError if modulus < 1 or exponent < 0.
BigInt mod_pow(const BigInt& base, const BigInt& exponent, const BigInt& modulus);

std::uint64_t mul_mod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t mod_pow_u64(std::uint64_t base, std::uint64_t exponent, std::uint64_t modulus);

enum class RoundResult { PassedRound, CompositeCertain };

/// One strong-probable-prime round for base t.  With m - 1 = d * 2^k, d odd,
/// computes a_0 = t^d and a_i = a_{i-1}^2; reports CompositeCertain if some
/// a_i first equals 1 with a_{i-1} != -1, or if a_k != 1.
/// Requires m odd, m >= 3 and 2 <= t <= m - 2 (DomainError otherwise).
RoundResult miller_rabin_round(const BigInt& m, const BigInt& t);
RoundResult miller_rabin_round_u64(std::uint64_t m, std::uint64_t t);

/// Exact primality for word-sized m (fast path shared by the searches).
bool is_prime_u64(std::uint64_t m);

/// Full verdict for arbitrary m >= 0.
Primality is_prime(const BigInt& m, const WitnessPolicy& policy = {});
Primality is_prime_u64_verdict(std::uint64_t m);

/// The base used for round `round` (round 0 is always 2) when m lies above
/// the deterministic threshold.  Exposed so witnesses can be reproduced.
BigInt random_base(const BigInt& m, std::uint64_t seed, unsigned round);

/// First divisor r in `divisors` with r | m.  `divisors` must be ascending.
/// The list may contain m itself; callers exclude r == m when that matters.
std::optional<std::uint64_t> trial_divide(const BigInt& m, std::span<const std::uint64_t> divisors);

/// Smallest prime r <= kSmallPrimeBound with r | m and r < m, if any.
std::optional<std::uint64_t> small_prime_factor(const BigInt& m);

/// Primes below kSmallPrimeBound, built once.
std::span<const std::uint64_t> small_primes();

/// Smallest prime factor of a word-sized n >= 2 (trial division).
std::uint64_t smallest_factor_u64(std::uint64_t n);

}  // namespace projprime::arith
