#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace projprime::arith {

/// Odd numbers per sieve block (the bitmap covers 2^21 integers).
inline constexpr std::uint64_t kSieveBlockOdds = std::uint64_t{1} << 20;

/// Primes in [lo, hi), ascending.  Segmented odd-only sieve using base
/// primes <= sqrt(hi).  Throws DomainError if hi < lo.
std::vector<std::uint64_t> sieve_segment(std::uint64_t lo, std::uint64_t hi);

/// Calls `visit` for every prime in [lo, hi) in ascending order without
/// materialising the list.
void for_each_prime(std::uint64_t lo, std::uint64_t hi, const std::function<void(std::uint64_t)>& visit);

std::uint64_t count_primes(std::uint64_t lo, std::uint64_t hi);

/// Primes <= limit by a plain sieve of Eratosthenes.
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

}  // namespace projprime::arith
