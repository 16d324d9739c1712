#include <doctest.h>

#include "projprime/errors.hpp"
#include "projprime/projective.hpp"
#include "projprime/sieve.hpp"

using namespace projprime;
using namespace projprime::projective;

namespace {

ProjectiveCandidate cand(std::uint64_t p, unsigned e, std::uint64_t n) {
  return ProjectiveCandidate::make(PrimePower::make(p, e), n);
}

// Naive oracle: full trial division of m up to sqrt(m).
bool naive_prime(std::uint64_t m) {
  if (m < 2) return false;
  for (std::uint64_t d = 2; d * d <= m; ++d)
    if (m % d == 0) return false;
  return true;
}

bool is_prime_power_word(std::uint64_t q, std::uint64_t& p, unsigned& e) {
  p = arith::smallest_factor_u64(q);
  e = 0;
  while (q % p == 0) {
    q /= p;
    ++e;
  }
  return q == 1;
}

}  // namespace

TEST_SUITE("projective") {

TEST_CASE("prime powers") {
  const PrimePower pp = PrimePower::make(2, 59);
  CHECK(pp.q == BigInt(1) << 59);
  CHECK(PrimePower::make(3, 1).q == 3);
  CHECK_THROWS_AS(PrimePower::make(4, 1), DomainError);
  CHECK_THROWS_AS(PrimePower::make(1, 1), DomainError);
  CHECK_THROWS_AS(PrimePower::make(3, 0), DomainError);
  CHECK_THROWS_AS(ProjectiveCandidate::make(pp, 1), DomainError);
}

TEST_CASE("repunit values and identity") {
  CHECK(repunit(2, 5) == 31);
  CHECK(repunit(5, 3) == 31);
  CHECK(repunit(7, 1) == 1);
  CHECK(repunit(3, 3) == 13);
  CHECK(repunit(90, 3) == 8191);
  CHECK_THROWS_AS(repunit(1, 3), DomainError);
  CHECK_THROWS_AS(repunit(2, 0), DomainError);
  for (int q = 2; q <= 60; ++q) {
    for (std::uint64_t n = 1; n <= 40; ++n) {
      const BigInt m = repunit(q, n);
      BigInt qn;
      mpz_ui_pow_ui(qn.get_mpz_t(), q, n);
      CHECK((q - 1) * m + 1 == qn);
      if (n % 2 == 1) CHECK(mpz_odd_p(m.get_mpz_t()));
    }
  }
  BigInt sum = 0, pw = 1;
  const BigInt q = BigInt(1) << 59;
  for (int i = 0; i < 59; ++i, pw *= q) sum += pw;
  CHECK(repunit(q, 59) == sum);
}

TEST_CASE("structural filter rules") {
  const FilterVerdict a = structural_filter(cand(11, 1, 4));
  REQUIRE(a.rule == Rule::NComposite);
  CHECK(filter_witness_verifies(cand(11, 1, 4), a));

  const ProjectiveCandidate b = cand(2, 9, 11);
  const FilterVerdict vb = structural_filter(b);
  REQUIRE(vb.rule == Rule::EPrune);
  CHECK(vb.numerator_a * vb.numerator_b == b.m * repunit(2, 9));
  CHECK(filter_witness_verifies(b, vb));

  const ProjectiveCandidate c = cand(2, 4, 3);
  CHECK(c.m == 273);
  const FilterVerdict vc = structural_filter(c);
  REQUIRE(vc.rule == Rule::QCongruent);
  CHECK(vc.factor == 3);

  CHECK(structural_filter(cand(11, 1, 3)).survives());
  CHECK(structural_filter(cand(2, 1, 2)).survives());
  CHECK(structural_filter(cand(2, 2, 2)).survives());  // Fermat 5
  CHECK(structural_filter(cand(3, 1, 2)).rule == Rule::QCongruent);
  CHECK(rule_name(Rule::EPrune) == "E-PRUNE");
  CHECK(stage_name(Stage::Trial) == "trial");
}

TEST_CASE("admissible divisor trial division") {
  const ProjectiveCandidate c = cand(11, 1, 3);
  CHECK(c.m == 133);
  const FilterVerdict v = lemma_trial_division(c, 20);
  REQUIRE(v.rule == Rule::Trial);
  CHECK(v.factor == 7);
  CHECK(lemma_trial_division(cand(2, 1, 5), 1000).survives());
  CHECK(lemma_trial_division(cand(3, 1, 3), 1000).survives());
  CHECK_THROWS_AS(lemma_trial_division(cand(2, 1, 2), 1000), DomainError);
  CHECK_THROWS_AS(lemma_trial_division(c, AdmissibleDivisors(5, 100)), DomainError);

  const AdmissibleDivisors d(3, 100);
  const std::vector<std::uint64_t> expect{7, 13, 19, 31, 37, 43, 61, 67, 73, 79, 97};
  CHECK(std::vector<std::uint64_t>(d.primes().begin(), d.primes().end()) == expect);
  CHECK(AdmissibleDivisors(97, 100).primes().empty());
}

TEST_CASE("pipeline examples") {
  const arith::WitnessPolicy policy;
  const Classification a = is_projective_prime(cand(2, 1, 13), policy);
  CHECK(a.primality.verdict == arith::Verdict::ProvenPrimeSmall);
  CHECK(a.decided_by == Stage::PrimalityTest);

  const Classification b = is_projective_prime(cand(2, 1, 11), policy);
  CHECK_FALSE(b.is_prime());
  CHECK(b.decided_by == Stage::Trial);
  CHECK(b.primality.witness == 23);
  CHECK(23 % 22 == 1);

  const ProjectiveCandidate big = cand(1201, 1, 1999);
  const Classification c = is_projective_prime(big, policy);
  CHECK(c.primality.verdict == arith::Verdict::ProbablePrime);
  CHECK(decimal_digits(big.m) == 6153);

  const Classification d = is_projective_prime(cand(2, 4, 3), policy);
  CHECK(d.decided_by == Stage::Structural);
  CHECK(arith::witness_verifies(273, d.primality));
}

TEST_CASE("pipeline agrees with naive trial division for q <= 200, n <= 20") {
  const arith::WitnessPolicy policy;
  int checked = 0, primes = 0;
  for (std::uint64_t q = 2; q <= 200; ++q) {
    std::uint64_t p;
    unsigned e;
    if (!is_prime_power_word(q, p, e)) continue;
    for (std::uint64_t n = 2; n <= 20; ++n) {
      const ProjectiveCandidate c = cand(p, e, n);
      const Classification k = is_projective_prime(c, policy, 1000);
      // Naive division is too slow above 10^12; GMP's own test stands in there.
      const bool oracle = c.m < BigInt("1000000000000") ? naive_prime(to_u64(c.m))
                                                         : mpz_probab_prime_p(c.m.get_mpz_t(), 40) > 0;
      CHECK_MESSAGE(k.is_prime() == oracle, "q=" << q << " n=" << n);
      if (!k.is_prime()) CHECK(arith::witness_verifies(c.m, k.primality));
      if (!k.filter.survives()) CHECK(filter_witness_verifies(c, k.filter));
      primes += k.is_prime();
      ++checked;
    }
  }
  CHECK(checked > 1000);
  CHECK(primes > 50);
}

TEST_CASE("every small prime factor of a composite candidate is admissible") {
  // q <= 100, odd prime n <= 13, factors r <= 10^5: r = 1 (mod 2n) or r = n.
  int factors = 0;
  for (std::uint64_t q = 2; q <= 100; ++q) {
    for (std::uint64_t n : {3, 5, 7, 11, 13}) {
      BigInt m = repunit(q, n);
      if (mpz_probab_prime_p(m.get_mpz_t(), 30)) continue;
      for (std::uint64_t r : arith::primes_up_to(100000)) {
        if (mpz_fdiv_ui(m.get_mpz_t(), r) != 0) continue;
        CHECK_MESSAGE((r % (2 * n) == 1 || r == n), "q=" << q << " n=" << n << " r=" << r);
        if (r == n) CHECK(q % n == 1);
        ++factors;
      }
    }
  }
  CHECK(factors > 100);
}

TEST_CASE("no prime candidate with n > e >= 2") {
  const arith::WitnessPolicy policy;
  for (std::uint64_t p : arith::primes_up_to(50)) {
    for (unsigned e = 3; e <= 6; ++e) {
      for (std::uint64_t n : arith::primes_up_to(30)) {
        if (n <= e) continue;
        const ProjectiveCandidate c = cand(p, e, n);
        CHECK(mpz_probab_prime_p(c.m.get_mpz_t(), 25) == 0);
        const FilterVerdict v = structural_filter(c);
        REQUIRE(v.rule == Rule::EPrune);
        CHECK(filter_witness_verifies(c, v));
      }
    }
  }
  // e = 2 leaves only n = 2.
  for (std::uint64_t p : arith::primes_up_to(200)) {
    for (std::uint64_t n : {3, 5, 7}) CHECK_FALSE(is_projective_prime(cand(p, 2, n), policy).is_prime());
  }
}

TEST_CASE("trial bound and shared divisor table give the same verdicts") {
  const arith::WitnessPolicy policy;
  const AdmissibleDivisors table(7, 100000);
  for (std::uint64_t p : arith::primes_up_to(3000)) {
    const ProjectiveCandidate c = cand(p, 1, 7);
    CHECK(is_projective_prime(c, policy, 100000, &table).is_prime() == is_projective_prime(c, policy, 0).is_prime());
  }
}

}  // TEST_SUITE
