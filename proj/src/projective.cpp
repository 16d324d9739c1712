#include "projprime/projective.hpp"

#include "projprime/errors.hpp"
#include "projprime/sieve.hpp"

namespace projprime::projective {

PrimePower PrimePower::make(std::uint64_t p, unsigned e) {
  if (!arith::is_prime_u64(p)) throw DomainError("prime power base " + std::to_string(p) + " is not prime");
  if (e < 1) throw DomainError("prime power exponent must be >= 1");
  PrimePower pp;
  pp.p = p;
  pp.e = e;
  mpz_pow_ui(pp.q.get_mpz_t(), from_u64(p).get_mpz_t(), e);
  return pp;
}

BigInt repunit(const BigInt& q, std::uint64_t n) {
  if (q < 2) throw DomainError("repunit: q must be >= 2");
  if (n < 1) throw DomainError("repunit: n must be >= 1");
  BigInt m;
  mpz_pow_ui(m.get_mpz_t(), q.get_mpz_t(), n);
  m -= 1;
  BigInt qm1 = q - 1;
  mpz_divexact(m.get_mpz_t(), m.get_mpz_t(), qm1.get_mpz_t());
  return m;
}

ProjectiveCandidate ProjectiveCandidate::make(const PrimePower& base, std::uint64_t n) {
  if (n < 2) throw DomainError("candidate exponent n must be >= 2");
  return {base, n, repunit(base.q, n)};
}

std::string_view rule_name(Rule rule) {
  switch (rule) {
    case Rule::NComposite: return "N-COMPOSITE";
    case Rule::EPrune: return "E-PRUNE";
    case Rule::QCongruent: return "Q-CONGRUENT";
    case Rule::Trial: return "TRIAL";
  }
  return "?";
}

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::Structural: return "structural";
    case Stage::Trial: return "trial";
    case Stage::PrimalityTest: return "miller-rabin";
  }
  return "?";
}

bool filter_witness_verifies(const ProjectiveCandidate& c, const FilterVerdict& v) {
  if (v.survives()) return false;
  const bool divides = v.factor > 1 && v.factor < c.m && mpz_divisible_p(c.m.get_mpz_t(), v.factor.get_mpz_t());
  if (!divides) return false;
  if (*v.rule == Rule::EPrune) {
    return c.m * v.denominator == v.numerator_a * v.numerator_b && v.numerator_a > v.denominator &&
           v.numerator_b > v.denominator;
  }
  return true;
}

FilterVerdict structural_filter(const ProjectiveCandidate& c) {
  const std::uint64_t n = c.n;
  const PrimePower& b = c.base;

  if (!arith::is_prime_u64(n)) {
    FilterVerdict v;
    v.rule = Rule::NComposite;
    v.factor = repunit(b.q, arith::smallest_factor_u64(n));
    return v;
  }

  if (b.e >= 2 && n > b.e) {
    FilterVerdict v;
    v.rule = Rule::EPrune;
    const BigInt p = from_u64(b.p);
    BigInt pn;
    mpz_pow_ui(pn.get_mpz_t(), p.get_mpz_t(), n);
    v.numerator_a = repunit(p, n);
    v.numerator_b = repunit(pn, b.e);
    v.denominator = repunit(p, b.e);
    // m = (A/g) * (B/(D/g)) with g = gcd(A, D); both parts exceed 1.
    BigInt g;
    mpz_gcd(g.get_mpz_t(), v.numerator_a.get_mpz_t(), v.denominator.get_mpz_t());
    v.factor = v.numerator_a / g;
    return v;
  }

  if (mpz_fdiv_ui(b.q.get_mpz_t(), n) == 1 && c.m > n) {
    FilterVerdict v;
    v.rule = Rule::QCongruent;
    v.factor = from_u64(n);
    return v;
  }
  return FilterVerdict::pass();
}

AdmissibleDivisors::AdmissibleDivisors(std::uint64_t n, std::uint64_t bound) : n_(n), bound_(bound) {
  if (n < 1) throw DomainError("admissible divisors need n >= 1");
  const std::uint64_t step = 2 * n;
  for (std::uint64_t r : arith::primes_up_to(bound)) {
    if (r % step == 1) primes_.push_back(r);
  }
}

FilterVerdict lemma_trial_division(const ProjectiveCandidate& c, const AdmissibleDivisors& divisors) {
  if (c.n < 3 || !arith::is_prime_u64(c.n)) throw DomainError("lemma_trial_division: n must be an odd prime");
  if (divisors.n() != c.n) throw DomainError("lemma_trial_division: divisor table built for a different n");

  const bool m_small = fits_u64(c.m);
  const std::uint64_t m_word = m_small ? to_u64(c.m) : 0;
  const bool q_small = fits_u64(c.base.q);
  const std::uint64_t q_word = q_small ? to_u64(c.base.q) : 0;
  const std::size_t limit = m_small ? kWordTrialPrimes : divisors.primes().size();
  std::size_t tried = 0;
  for (std::uint64_t r : divisors.primes()) {
    if (tried++ == limit) break;
    if (m_small && (r >= m_word || r > m_word / r)) break;
    const std::uint64_t qr = q_small ? q_word % r : mpz_fdiv_ui(c.base.q.get_mpz_t(), r);
    if (qr <= 1) continue;  // m = 1 or m = n (mod r), and r > n
    if (arith::mod_pow_u64(qr, c.n, r) == 1) {
      FilterVerdict v;
      v.rule = Rule::Trial;
      v.factor = from_u64(r);
      return v;
    }
  }
  return FilterVerdict::pass();
}

FilterVerdict lemma_trial_division(const ProjectiveCandidate& c, std::uint64_t bound) {
  return lemma_trial_division(c, AdmissibleDivisors(c.n, bound));
}

Classification is_projective_prime(const ProjectiveCandidate& c, const arith::WitnessPolicy& policy,
                                   std::uint64_t trial_bound, const AdmissibleDivisors* divisors) {
  Classification out;
  if (FilterVerdict v = structural_filter(c); !v.survives()) {
    out.primality = arith::Primality::composite_by_factor(v.factor);
    out.decided_by = Stage::Structural;
    out.filter = std::move(v);
    return out;
  }
  if (c.n >= 3) {
    FilterVerdict v = divisors ? lemma_trial_division(c, *divisors) : lemma_trial_division(c, trial_bound);
    if (!v.survives()) {
      out.primality = arith::Primality::composite_by_factor(v.factor);
      out.decided_by = Stage::Trial;
      out.filter = std::move(v);
      return out;
    }
  }
  out.primality = arith::is_prime(c.m, policy);
  out.decided_by = Stage::PrimalityTest;
  return out;
}

}  // namespace projprime::projective
