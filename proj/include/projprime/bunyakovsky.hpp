#pragma once

// Integer polynomials, fixed divisors and prime-value counting.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "projprime/arith.hpp"
#include "projprime/bigint.hpp"

namespace projprime::bunyakovsky {

class IntPolynomial {
 public:
  IntPolynomial() = default;
  /// Coefficients c_0, c_1, ...; trailing zeros are dropped.
  explicit IntPolynomial(std::vector<BigInt> coefficients);

  /// "c0,c1,...,cn", constant term first.
  static IntPolynomial parse(std::string_view text);
  /// 1 + t + ... + t^(n-1).
  static IntPolynomial repunit_family(std::uint64_t n);

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  const std::vector<BigInt>& coefficients() const { return c_; }
  const BigInt& leading() const;
  /// gcd of the coefficients, >= 0.
  BigInt content() const;

  BigInt operator()(const BigInt& t) const;
  std::string to_string() const;

  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

 private:
  std::vector<BigInt> c_;
};

/// True iff p divides f(t) for every integer t: reduce f modulo t^p - t and
/// the coefficients modulo p, then look for a nonzero coefficient.
/// DomainError if p is not prime.
bool divides_all_values(const IntPolynomial& f, const BigInt& p);

/// Primes dividing every value of f, ascending.  Candidates are the prime
/// factors of f(0), or of the first nonzero f(k) when f(0) = 0.
std::vector<BigInt> prime_fixed_divisors(const IntPolynomial& f);

/// gcd(f(0), ..., f(deg f)), the largest integer dividing every value.
BigInt fixed_divisor(const IntPolynomial& f);

enum class Tri { Yes, No, Unknown };
std::string_view tri_name(Tri t);

struct Report {
  bool leading_positive = false;
  Tri irreducible = Tri::Unknown;
  std::string factorization;  // witness when irreducible == No
  BigInt fixed_divisor;
  Tri satisfies = Tri::Unknown;
};

/// The three hypotheses of the conjecture.  Irreducibility is decided for
/// degree <= 3 (rational roots, discriminant for quadratics) and for the
/// family 1 + t + ... + t^(n-1); otherwise Unknown.
Report bunyakovsky_report(const IntPolynomial& f);

enum class ValueDomain { Naturals, Primes, PrimePowers };
std::string_view domain_name(ValueDomain d);
ValueDomain parse_domain(std::string_view name);

struct CountOptions {
  std::uint64_t t_min = 1;  // naturals start at 1; f(0) is counted only with t_min = 0
  int workers = 0;
  bool collect_hits = false;
};

struct CountResult {
  std::uint64_t tested = 0;
  std::uint64_t primes = 0;
  std::vector<std::uint64_t> hits;  // t values, ascending, when collected
};

/// Counts t in the domain with t_min <= t <= t_max and f(t) prime.
CountResult count_prime_values(const IntPolynomial& f, std::uint64_t t_max, ValueDomain domain,
                               const arith::WitnessPolicy& policy = {}, const CountOptions& options = {});

namespace reference {

/// Serial BigInt evaluation of every t, no fast paths.
std::uint64_t count_prime_values(const IntPolynomial& f, std::uint64_t t_max, ValueDomain domain,
                                 const arith::WitnessPolicy& policy = {}, std::uint64_t t_min = 1);

}  // namespace reference

}  // namespace projprime::bunyakovsky
