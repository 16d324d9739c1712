#include "projprime/arith.hpp"

#include <algorithm>

#include "projprime/digest.hpp"
#include "projprime/errors.hpp"
#include "projprime/sieve.hpp"

namespace projprime::arith {

namespace {

using u128 = unsigned __int128;

// psi_12: the least composite that is a strong pseudoprime to all twelve
// bases in kDeterministicBases.
const BigInt& deterministic_limit() {
  static const BigInt limit("318665857834031151167461", 10);
  return limit;
}

// Montgomery arithmetic modulo an odd 64-bit n.
class Montgomery {
 public:
  explicit Montgomery(std::uint64_t n) : n_(n) {
    std::uint64_t inv = n;  // correct to 3 bits for odd n
    for (int i = 0; i < 5; ++i) inv *= 2 - n * inv;
    inv_ = inv;
    one_ = (0 - n) % n;  // 2^64 mod n
    r2_ = static_cast<std::uint64_t>(static_cast<u128>(one_) * one_ % n);
  }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    u128 t = static_cast<u128>(a) * b;
    std::uint64_t m = static_cast<std::uint64_t>(t) * inv_;
    std::uint64_t mn_hi = static_cast<std::uint64_t>((static_cast<u128>(m) * n_) >> 64);
    std::uint64_t t_hi = static_cast<std::uint64_t>(t >> 64);
    return t_hi >= mn_hi ? t_hi - mn_hi : t_hi - mn_hi + n_;
  }

  std::uint64_t to(std::uint64_t a) const { return mul(a % n_, r2_); }
  std::uint64_t one() const { return one_; }
  std::uint64_t minus_one() const { return n_ - one_; }

  std::uint64_t pow(std::uint64_t base_m, std::uint64_t e) const {
    std::uint64_t r = one_;
    while (e) {
      if (e & 1) r = mul(r, base_m);
      base_m = mul(base_m, base_m);
      e >>= 1;
    }
    return r;
  }

 private:
  std::uint64_t n_;
  std::uint64_t inv_;
  std::uint64_t one_;
  std::uint64_t r2_;
};

RoundResult mr_round_mont(const Montgomery& mont, std::uint64_t d, unsigned k, std::uint64_t t) {
  std::uint64_t a = mont.pow(mont.to(t), d);
  if (a == mont.one()) return RoundResult::PassedRound;
  for (unsigned i = 1; i <= k; ++i) {
    std::uint64_t prev = a;
    a = mont.mul(a, a);
    if (a == mont.one()) return prev == mont.minus_one() ? RoundResult::PassedRound : RoundResult::CompositeCertain;
  }
  return RoundResult::CompositeCertain;
}

RoundResult mr_round_big(const BigInt& m, const BigInt& d, unsigned k, const BigInt& t) {
  BigInt a = mod_pow(t, d, m);
  if (a == 1) return RoundResult::PassedRound;
  const BigInt minus_one = m - 1;
  BigInt prev;
  for (unsigned i = 1; i <= k; ++i) {
    prev = a;
    mpz_mul(a.get_mpz_t(), a.get_mpz_t(), a.get_mpz_t());
    mpz_tdiv_r(a.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    if (a == 1) return prev == minus_one ? RoundResult::PassedRound : RoundResult::CompositeCertain;
  }
  return RoundResult::CompositeCertain;
}

// Products of consecutive small primes, each below 2^64, so one mpz_fdiv_ui
// screens several primes at once.
struct PrimeGroup {
  std::uint64_t product;
  std::size_t first;
  std::size_t last;
};

const std::vector<PrimeGroup>& small_prime_groups() {
  static const std::vector<PrimeGroup> groups = [] {
    std::vector<PrimeGroup> out;
    auto primes = small_primes();
    std::size_t i = 0;
    while (i < primes.size()) {
      PrimeGroup g{1, i, i};
      while (i < primes.size() && static_cast<u128>(g.product) * primes[i] < (u128{1} << 64)) {
        g.product *= primes[i];
        ++i;
      }
      g.last = i;
      out.push_back(g);
    }
    return out;
  }();
  return groups;
}

Primality deterministic_big(const BigInt& m) {
  if (auto r = small_prime_factor(m)) return Primality::composite_by_factor(from_u64(*r));
  BigInt d = m - 1;
  unsigned k = static_cast<unsigned>(mpz_scan1(d.get_mpz_t(), 0));
  d >>= k;
  for (std::uint32_t b : kDeterministicBases) {
    BigInt t(b);
    if (mr_round_big(m, d, k, t) == RoundResult::CompositeCertain) {
      return Primality::composite_by_base(t, static_cast<unsigned>(&b - kDeterministicBases.data()) + 1);
    }
  }
  return {Verdict::ProvenPrimeSmall, WitnessKind::None, BigInt(), static_cast<unsigned>(kDeterministicBases.size())};
}

}  // namespace

void WitnessPolicy::validate() const {
  if (rounds_above_threshold < 1) throw DomainError("witness policy needs at least one round above the threshold");
  if (deterministic_threshold < 5) throw DomainError("deterministic threshold must be at least 5");
  if (deterministic_threshold > deterministic_limit()) {
    throw DomainError("deterministic threshold exceeds the range where the fixed witness set is exact");
  }
}

std::uint64_t WitnessPolicy::digest() const {
  std::string canon = "threshold=" + to_decimal(deterministic_threshold) +
                      ";rounds=" + std::to_string(rounds_above_threshold) + ";seed=" + std::to_string(rng_seed);
  return fnv1a64(canon);
}

bool witness_verifies(const BigInt& m, const Primality& v) {
  if (v.verdict != Verdict::Composite) return false;
  switch (v.witness_kind) {
    case WitnessKind::None:
      return m < 2;
    case WitnessKind::Factor:
      return v.witness > 1 && v.witness < m && mpz_divisible_p(m.get_mpz_t(), v.witness.get_mpz_t()) != 0;
    case WitnessKind::MillerRabinBase:
      if (m < 3 || mpz_even_p(m.get_mpz_t()) || v.witness < 2 || v.witness > m - 2) return false;
      return miller_rabin_round(m, v.witness) == RoundResult::CompositeCertain;
  }
  return false;
}

BigInt mod_pow(const BigInt& base, const BigInt& exponent, const BigInt& modulus) {
  if (modulus < 1) throw DomainError("mod_pow: modulus must be >= 1");
  if (exponent < 0) throw DomainError("mod_pow: exponent must be >= 0");
  if (modulus == 1) return 0;

  BigInt b;
  mpz_fdiv_r(b.get_mpz_t(), base.get_mpz_t(), modulus.get_mpz_t());
  const bool small_base = b.fits_ulong_p();
  const unsigned long b_ui = small_base ? b.get_ui() : 0;

  BigInt r = 1;
  mpz_srcptr e = exponent.get_mpz_t();
  mpz_srcptr mod = modulus.get_mpz_t();
  for (std::size_t bit = mpz_sizeinbase(e, 2); bit-- > 0;) {
    mpz_mul(r.get_mpz_t(), r.get_mpz_t(), r.get_mpz_t());
    mpz_tdiv_r(r.get_mpz_t(), r.get_mpz_t(), mod);
    if (mpz_tstbit(e, bit)) {
      if (small_base) {
        mpz_mul_ui(r.get_mpz_t(), r.get_mpz_t(), b_ui);
      } else {
        mpz_mul(r.get_mpz_t(), r.get_mpz_t(), b.get_mpz_t());
      }
      mpz_tdiv_r(r.get_mpz_t(), r.get_mpz_t(), mod);
    }
  }
  return r;
}

std::uint64_t mul_mod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t mod_pow_u64(std::uint64_t base, std::uint64_t exponent, std::uint64_t modulus) {
  if (modulus == 0) throw DomainError("mod_pow: modulus must be >= 1");
  if (modulus == 1) return 0;
  std::uint64_t r = 1;
  base %= modulus;
  while (exponent) {
    if (exponent & 1) r = mul_mod_u64(r, base, modulus);
    base = mul_mod_u64(base, base, modulus);
    exponent >>= 1;
  }
  return r;
}

RoundResult miller_rabin_round(const BigInt& m, const BigInt& t) {
  if (m < 3 || mpz_even_p(m.get_mpz_t())) throw DomainError("miller_rabin_round: m must be odd and >= 3");
  if (t < 2 || t > m - 2) throw DomainError("miller_rabin_round: base must lie in [2, m-2]");
  if (fits_u64(m)) return miller_rabin_round_u64(to_u64(m), to_u64(t));
  BigInt d = m - 1;
  unsigned k = static_cast<unsigned>(mpz_scan1(d.get_mpz_t(), 0));
  d >>= k;
  return mr_round_big(m, d, k, t);
}

RoundResult miller_rabin_round_u64(std::uint64_t m, std::uint64_t t) {
  if (m < 3 || m % 2 == 0) throw DomainError("miller_rabin_round: m must be odd and >= 3");
  if (t < 2 || t > m - 2) throw DomainError("miller_rabin_round: base must lie in [2, m-2]");
  std::uint64_t d = m - 1;
  unsigned k = static_cast<unsigned>(__builtin_ctzll(d));
  d >>= k;
  return mr_round_mont(Montgomery(m), d, k, t);
}

bool is_prime_u64(std::uint64_t m) {
  if (m < 2) return false;
  for (std::uint32_t p : kDeterministicBases) {
    if (m == p) return true;
    if (m % p == 0) return false;
  }
  if (m < 41 * 41) return true;
  std::uint64_t d = m - 1;
  unsigned k = static_cast<unsigned>(__builtin_ctzll(d));
  d >>= k;
  Montgomery mont(m);
  for (std::uint32_t b : kDeterministicBases) {
    if (mr_round_mont(mont, d, k, b) == RoundResult::CompositeCertain) return false;
  }
  return true;
}

Primality is_prime_u64_verdict(std::uint64_t m) {
  if (m < 2) return Primality::not_prime();
  for (std::uint32_t p : kDeterministicBases) {
    if (m == p) return {Verdict::ProvenPrimeSmall, WitnessKind::None, BigInt(), 0};
    if (m % p == 0) return Primality::composite_by_factor(BigInt(p));
  }
  if (m < 41 * 41) return {Verdict::ProvenPrimeSmall, WitnessKind::None, BigInt(), 0};
  std::uint64_t d = m - 1;
  unsigned k = static_cast<unsigned>(__builtin_ctzll(d));
  d >>= k;
  Montgomery mont(m);
  unsigned rounds = 0;
  for (std::uint32_t b : kDeterministicBases) {
    ++rounds;
    if (mr_round_mont(mont, d, k, b) == RoundResult::CompositeCertain) {
      return Primality::composite_by_base(BigInt(b), rounds);
    }
  }
  return {Verdict::ProvenPrimeSmall, WitnessKind::None, BigInt(), rounds};
}

BigInt random_base(const BigInt& m, std::uint64_t seed, unsigned round) {
  if (round == 0) return 2;
  if (m < 5) throw DomainError("random_base: m too small");
  const std::uint64_t m_low = mpz_getlimbn(m.get_mpz_t(), 0);
  const std::uint64_t key = mix64(mix64(seed) ^ m_low) ^ (static_cast<std::uint64_t>(round) * 0xd1b54a32d192ed03ULL);
  const std::size_t words = (mpz_sizeinbase(m.get_mpz_t(), 2) + 64 + 63) / 64;
  std::vector<std::uint64_t> buf(words);
  for (std::size_t j = 0; j < words; ++j) buf[j] = mix64(key + j);
  BigInt x;
  mpz_import(x.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0, buf.data());
  BigInt range = m - 3;
  mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), range.get_mpz_t());
  return x + 2;
}

Primality is_prime(const BigInt& m, const WitnessPolicy& policy) {
  policy.validate();
  if (m < 2) return Primality::not_prime();
  if (m < policy.deterministic_threshold) {
    if (fits_u64(m)) return is_prime_u64_verdict(to_u64(m));
    return deterministic_big(m);
  }
  if (auto r = small_prime_factor(m)) return Primality::composite_by_factor(from_u64(*r));
  BigInt d = m - 1;
  unsigned k = static_cast<unsigned>(mpz_scan1(d.get_mpz_t(), 0));
  d >>= k;
  for (unsigned round = 0; round < policy.rounds_above_threshold; ++round) {
    BigInt t = random_base(m, policy.rng_seed, round);
    if (mr_round_big(m, d, k, t) == RoundResult::CompositeCertain) {
      return Primality::composite_by_base(std::move(t), round + 1);
    }
  }
  return {Verdict::ProbablePrime, WitnessKind::None, BigInt(), policy.rounds_above_threshold};
}

std::optional<std::uint64_t> trial_divide(const BigInt& m, std::span<const std::uint64_t> divisors) {
  for (std::uint64_t r : divisors) {
    if (r == 0) continue;
    if (mpz_divisible_ui_p(m.get_mpz_t(), r)) return r;
  }
  return std::nullopt;
}

std::span<const std::uint64_t> small_primes() {
  static const std::vector<std::uint64_t> table = primes_up_to(kSmallPrimeBound);
  return table;
}

std::optional<std::uint64_t> small_prime_factor(const BigInt& m) {
  auto primes = small_primes();
  if (fits_u64(m)) {
    const std::uint64_t v = to_u64(m);
    for (std::uint64_t r : primes) {
      if (r >= v) break;
      if (v % r == 0) return r;
    }
    return std::nullopt;
  }
  for (const PrimeGroup& g : small_prime_groups()) {
    const std::uint64_t res = mpz_fdiv_ui(m.get_mpz_t(), g.product);
    for (std::size_t i = g.first; i < g.last; ++i) {
      if (res % primes[i] == 0) return primes[i];
    }
  }
  return std::nullopt;
}

std::uint64_t smallest_factor_u64(std::uint64_t n) {
  if (n < 2) throw DomainError("smallest_factor_u64: n must be >= 2");
  if (n % 2 == 0) return 2;
  for (std::uint64_t d = 3; d <= n / d; d += 2) {
    if (n % d == 0) return d;
  }
  return n;
}

}  // namespace projprime::arith
