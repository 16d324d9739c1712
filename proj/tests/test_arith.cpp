#include <doctest.h>

#include <random>

#include "projprime/arith.hpp"
#include "projprime/digest.hpp"
#include "projprime/errors.hpp"
#include "projprime/projective.hpp"
#include "projprime/sieve.hpp"

using namespace projprime;
using namespace projprime::arith;

TEST_SUITE("arith") {

TEST_CASE("bigint parsing and decimal round trip") {
  CHECK(parse_bigint("1e6") == 1000000);
  CHECK(parse_bigint("10^9") == 1000000000);
  CHECK(parse_bigint("2^60") == BigInt(1) << 60);
  CHECK(parse_u64("18446744073709551615") == UINT64_MAX);
  CHECK_THROWS_AS(parse_u64("18446744073709551616"), DomainError);
  CHECK_THROWS_AS(parse_bigint("-5"), DomainError);
  CHECK_THROWS_AS(parse_bigint("12a"), DomainError);
  CHECK_THROWS_AS(parse_bigint(""), DomainError);

  const BigInt big = projective::repunit(1201, 1999);
  CHECK(parse_bigint(to_decimal(big)) == big);
  CHECK(decimal_digits(big) == 6153);
  CHECK(decimal_digits(BigInt(0)) == 1);
  CHECK(decimal_digits(BigInt(999)) == 3);
  CHECK(decimal_digits(BigInt(1000)) == 4);
  CHECK(canonical_bytes(BigInt(258)) == std::string("\x01\x02", 2));
}

TEST_CASE("mod_pow") {
  CHECK(mod_pow(2, 10, 1000) == 24);
  for (int t = 1; t <= 12; ++t) CHECK(mod_pow(t, 12, 13) == 1);
  CHECK(mod_pow(5, 132, 133) != 1);
  CHECK(mod_pow(7, 0, 13) == 1);
  CHECK(mod_pow(7, 5, 1) == 0);
  CHECK_THROWS_AS(mod_pow(2, 3, 0), DomainError);
  CHECK_THROWS_AS(mod_pow(2, -1, 7), DomainError);
  CHECK(mod_pow_u64(3, 200, 1000000007) == mod_pow(3, 200, 1000000007).get_ui());
  CHECK_THROWS_AS(mod_pow_u64(2, 3, 0), DomainError);
}

TEST_CASE("mod_pow exponent additivity on random words") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const BigInt b = from_u64(rng()), m = from_u64(rng() | 1);
    const BigInt e1 = from_u64(rng() >> 8), e2 = from_u64(rng() >> 8);
    BigInt rhs = mod_pow(b, e1, m) * mod_pow(b, e2, m) % m;
    CHECK(mod_pow(b, e1 + e2, m) == rhs);
  }
}

TEST_CASE("mod_pow agrees with mpz_powm on large operands") {
  gmp_randclass gr(gmp_randinit_default);
  gr.seed(5);
  for (int i = 0; i < 20; ++i) {
    const BigInt m = gr.get_z_bits(600 + 37 * i) | 1;
    const BigInt b = gr.get_z_bits(500), e = gr.get_z_bits(400);
    BigInt expect;
    mpz_powm(expect.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    CHECK(mod_pow(b, e, m) == expect);
  }
}

TEST_CASE("miller_rabin_round") {
  CHECK(miller_rabin_round(13, 2) == RoundResult::PassedRound);
  CHECK(miller_rabin_round(133, 2) == RoundResult::CompositeCertain);
  for (int t = 2; t <= 8189; t += 97) CHECK(miller_rabin_round(8191, t) == RoundResult::PassedRound);
  // 2047 = 23 * 89 is a strong pseudoprime to base 2 but not base 3.
  CHECK(miller_rabin_round(2047, 2) == RoundResult::PassedRound);
  CHECK(miller_rabin_round(2047, 3) == RoundResult::CompositeCertain);
  CHECK_THROWS_AS(miller_rabin_round(14, 3), DomainError);
  CHECK_THROWS_AS(miller_rabin_round(1, 3), DomainError);
  CHECK_THROWS_AS(miller_rabin_round(13, 1), DomainError);
  CHECK_THROWS_AS(miller_rabin_round(13, 12), DomainError);

  const BigInt big = projective::repunit(2, 127);  // Mersenne prime 2^127 - 1
  CHECK(miller_rabin_round(big, 3) == RoundResult::PassedRound);
  CHECK(miller_rabin_round(big * 3 + 2, 5) == RoundResult::CompositeCertain);
  CHECK(miller_rabin_round_u64(3215031751ULL, 2) == RoundResult::PassedRound);  // spsp to 2,3,5,7
  CHECK(miller_rabin_round_u64(3215031751ULL, 11) == RoundResult::CompositeCertain);
}

TEST_CASE("is_prime verdicts") {
  const WitnessPolicy policy;
  CHECK(is_prime(31, policy).verdict == Verdict::ProvenPrimeSmall);
  CHECK(is_prime(8191, policy).verdict == Verdict::ProvenPrimeSmall);
  const Primality c = is_prime(273, policy);
  CHECK(c.verdict == Verdict::Composite);
  CHECK(witness_verifies(273, c));

  for (int m : {0, 1}) {
    const Primality v = is_prime(m, policy);
    CHECK_FALSE(v.is_prime());
    CHECK(v.witness_kind == WitnessKind::None);
  }
  CHECK(is_prime(2, policy).is_prime());
  CHECK(is_prime(3, policy).is_prime());
  CHECK_FALSE(is_prime(4, policy).is_prime());

  const BigInt m59 = projective::repunit(BigInt(1) << 59, 59);
  const Primality v = is_prime(m59, policy);
  CHECK(v.verdict == Verdict::ProbablePrime);
  CHECK(v.rounds == 40);

  // Strong pseudoprime to all twelve fixed bases; above 2^64, so random rounds decide.
  const BigInt psi12("318665857834031151167461", 10);
  const Primality p12 = is_prime(psi12, policy);
  CHECK(p12.verdict == Verdict::Composite);
  CHECK(witness_verifies(psi12, p12));

  CHECK(is_prime(UINT64_MAX, policy).verdict == Verdict::Composite);
  CHECK(is_prime(from_u64(18446744073709551557ULL), policy).verdict == Verdict::ProvenPrimeSmall);
}

TEST_CASE("is_prime agrees with a sieve on every odd m up to 10^6") {
  const std::uint64_t limit = 1000000;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i * i <= limit; ++i)
    if (!composite[i])
      for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  const WitnessPolicy policy;
  std::uint64_t mismatches = 0, bad_witness = 0;
  for (std::uint64_t m = 3; m <= limit; m += 2) {
    const Primality v = is_prime(from_u64(m), policy);
    if (v.is_prime() == composite[m]) ++mismatches;
    if (!v.is_prime() && !witness_verifies(from_u64(m), v)) ++bad_witness;
    if (is_prime_u64(m) == composite[m]) ++mismatches;
  }
  CHECK(mismatches == 0);
  CHECK(bad_witness == 0);
}

TEST_CASE("composite witnesses above the threshold re-verify") {
  const WitnessPolicy policy;
  gmp_randclass gr(gmp_randinit_default);
  gr.seed(99);
  int composites = 0;
  for (int i = 0; i < 200; ++i) {
    const BigInt m = gr.get_z_bits(200) | 1;
    const Primality v = is_prime(m, policy);
    if (v.is_prime()) {
      CHECK(mpz_probab_prime_p(m.get_mpz_t(), 30) > 0);
    } else {
      ++composites;
      CHECK(witness_verifies(m, v));
      CHECK(mpz_probab_prime_p(m.get_mpz_t(), 30) == 0);
    }
  }
  CHECK(composites > 100);
  // A semiprime of two 100-bit primes escapes the trial-division table.
  BigInt p = gr.get_z_bits(100), q = gr.get_z_bits(100);
  mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
  mpz_nextprime(q.get_mpz_t(), q.get_mpz_t());
  const Primality v = is_prime(p * q, policy);
  CHECK(v.witness_kind == WitnessKind::MillerRabinBase);
  CHECK(witness_verifies(p * q, v));
}

TEST_CASE("is_prime is deterministic for a fixed policy and seed-sensitive otherwise") {
  WitnessPolicy a, b;
  b.rng_seed = 12345;
  const BigInt m = projective::repunit(2, 89) * projective::repunit(2, 107);
  const Primality v1 = is_prime(m, a), v2 = is_prime(m, a);
  CHECK(v1.witness == v2.witness);
  CHECK(v1.rounds == v2.rounds);
  CHECK(random_base(m, 0, 0) == 2);
  CHECK(random_base(m, 0, 1) == random_base(m, 0, 1));
  CHECK(random_base(m, 0, 3) != random_base(m, 12345, 3));
  for (unsigned r = 0; r < 50; ++r) {
    const BigInt t = random_base(m, 77, r);
    CHECK(t >= 2);
    CHECK(t <= m - 2);
  }
  CHECK(is_prime(m, b).verdict == Verdict::Composite);
}

TEST_CASE("witness policy validation and digest") {
  WitnessPolicy p;
  CHECK_NOTHROW(p.validate());
  p.rounds_above_threshold = 0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.rounds_above_threshold = 5;
  p.deterministic_threshold = BigInt("318665857834031151167462", 10);
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.deterministic_threshold = 4;
  CHECK_THROWS_AS(p.validate(), DomainError);

  WitnessPolicy a, b;
  CHECK(a.digest() == b.digest());
  b.rng_seed = 1;
  CHECK(a.digest() != b.digest());

  // A lowered threshold sends small inputs through the randomized rounds.
  WitnessPolicy low;
  low.deterministic_threshold = 1000;
  low.rounds_above_threshold = 3;
  const Primality v = is_prime(8191, low);
  CHECK(v.verdict == Verdict::ProbablePrime);
  CHECK(v.rounds == 3);
}

TEST_CASE("sieve_segment") {
  CHECK(sieve_segment(0, 10) == std::vector<std::uint64_t>{2, 3, 5, 7});
  CHECK(sieve_segment(10, 10).empty());
  CHECK(sieve_segment(0, 2).empty());
  CHECK(sieve_segment(2, 3) == std::vector<std::uint64_t>{2});
  CHECK(sieve_segment(89, 98) == std::vector<std::uint64_t>{89, 97});
  CHECK_THROWS_AS(sieve_segment(10, 5), DomainError);
  CHECK(count_primes(2, 1000001) == 78498);
  CHECK(primes_up_to(1000000).size() == 78498);
  CHECK(primes_up_to(1).empty());

  // Segments straddling block boundaries agree with the plain sieve.
  const auto all = primes_up_to(5000000);
  std::vector<std::uint64_t> pieces;
  for (std::uint64_t lo = 0; lo <= 5000000; lo += 777777) {
    const auto s = sieve_segment(lo, std::min<std::uint64_t>(lo + 777777, 5000001));
    pieces.insert(pieces.end(), s.begin(), s.end());
  }
  CHECK(pieces == all);

  const std::uint64_t hi = 1ULL << 40;
  for (std::uint64_t p : sieve_segment(hi - 2000, hi)) CHECK(is_prime_u64(p));
  CHECK(sieve_segment(hi - 2000, hi).size() == count_primes(hi - 2000, hi));

  std::uint64_t visited = 0, last = 0;
  for_each_prime(100, 1000, [&](std::uint64_t p) {
    CHECK(p > last);
    last = p;
    ++visited;
  });
  CHECK(visited == 143);
}

TEST_CASE("trial_divide and small factors") {
  const std::vector<std::uint64_t> a{7, 13, 19}, b{7, 13, 19, 31}, c{7, 13};
  CHECK(trial_divide(133, a) == 7u);
  CHECK(trial_divide(31, b) == 31u);
  CHECK_FALSE(trial_divide(757, c).has_value());
  CHECK_FALSE(trial_divide(1, a).has_value());
  CHECK(small_prime_factor(9999 * 9973) == 3u);
  CHECK_FALSE(small_prime_factor(9973).has_value());
  CHECK(small_prime_factor(BigInt(9973) * 10007) == 9973u);
  CHECK(small_primes().front() == 2);
  CHECK(small_primes().back() == 9973);
  CHECK(smallest_factor_u64(2047) == 23);
  CHECK(smallest_factor_u64(97) == 97);
}

TEST_CASE("digests") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
  CHECK(fnv1a128("31") == fnv1a128("31"));
  CHECK_FALSE(fnv1a128("31") == fnv1a128("13"));
  CHECK(mix64(1) != mix64(2));
}

}  // TEST_SUITE
