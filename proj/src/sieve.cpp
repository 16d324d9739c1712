#include "projprime/sieve.hpp"

#include <algorithm>
#include <cmath>

#include "projprime/errors.hpp"

namespace projprime::arith {

namespace {

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i * i <= limit; ++i) {
    if (composite[i]) continue;
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (!composite[i]) out.push_back(i);
  }
  return out;
}

void for_each_prime(std::uint64_t lo, std::uint64_t hi, const std::function<void(std::uint64_t)>& visit) {
  if (hi < lo) throw DomainError("sieve_segment: hi < lo");
  if (hi <= 2 || lo >= hi) return;
  if (lo <= 2) visit(2);

  std::uint64_t start = std::max<std::uint64_t>(lo, 3);
  if (start % 2 == 0) ++start;
  if (start >= hi) return;

  const std::vector<std::uint64_t> base = primes_up_to(isqrt(hi - 1));
  std::vector<std::uint64_t> bits(kSieveBlockOdds / 64);

  for (std::uint64_t block_lo = start; block_lo < hi; block_lo += 2 * kSieveBlockOdds) {
    // Odd numbers block_lo + 2*i for i in [0, count).
    const std::uint64_t span = std::min<std::uint64_t>(hi - block_lo, 2 * kSieveBlockOdds);
    const std::uint64_t count = (span + 1) / 2;
    std::fill(bits.begin(), bits.end(), 0);
    const std::uint64_t block_last = block_lo + 2 * (count - 1);

    for (std::size_t bi = 1; bi < base.size(); ++bi) {
      const std::uint64_t p = base[bi];
      if (p * p > block_last) break;
      std::uint64_t first = std::max(p * p, (block_lo + p - 1) / p * p);
      if (first % 2 == 0) first += p;
      for (std::uint64_t j = (first - block_lo) / 2; j < count; j += p) bits[j >> 6] |= std::uint64_t{1} << (j & 63);
    }
    if (block_lo == 1) bits[0] |= 1;

    for (std::uint64_t j = 0; j < count; ++j) {
      if (!(bits[j >> 6] >> (j & 63) & 1)) visit(block_lo + 2 * j);
    }
  }
}

std::vector<std::uint64_t> sieve_segment(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  if (hi > lo) out.reserve(static_cast<std::size_t>((hi - lo) / 8 + 16));
  for_each_prime(lo, hi, [&](std::uint64_t p) { out.push_back(p); });
  return out;
}

std::uint64_t count_primes(std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t n = 0;
  for_each_prime(lo, hi, [&](std::uint64_t) { ++n; });
  return n;
}

}  // namespace projprime::arith
