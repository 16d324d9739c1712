#include "projprime/errors.hpp"
#include "projprime/search.hpp"
#include "projprime/sieve.hpp"

namespace projprime::search::reference {

std::vector<std::uint64_t> search_fixed_n(std::uint64_t n, std::uint64_t p_max, const arith::WitnessPolicy& policy) {
  if (n < 3 || !arith::is_prime_u64(n)) throw DomainError("reference search: n must be an odd prime");
  std::vector<std::uint64_t> hits;
  for (std::uint64_t p : arith::primes_up_to(p_max)) {
    const BigInt q = from_u64(p);
    BigInt m = 1;
    for (std::uint64_t i = 1; i < n; ++i) m = m * q + 1;
    if (arith::is_prime(m, policy).is_prime()) hits.push_back(p);
  }
  return hits;
}

}  // namespace projprime::search::reference
