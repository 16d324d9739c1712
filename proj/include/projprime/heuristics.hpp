#pragma once

// Heuristic densities for projective primes: Mertens products, the
// constants c_n, expected counts for fixed n and fixed p, Polya's PNT
// products and the twin-prime constant.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace projprime::heuristics {

/// Euler-Mascheroni constant, 30 significant digits.
inline constexpr long double kGamma = 0.577215664901532860606512090082L;

long double e_gamma();  // e^gamma = 1.781072...
long double mu();       // e^-gamma = 0.561459...

enum class FormulaId {
  MertensProduct,
  CN,
  ExpectedFixedN,
  ExpectedN3,
  ExpectedFixedP,
  ExpectedFixedPSimplified,
  ProbabilityFixedP,
  PolyaFull,
  PolyaSqrt,
  PolyaMagicMu,
  PolyaReference,
  TwinPrimeConstant,
};

std::string_view formula_name(FormulaId id);

struct RealEstimate {
  long double value = 0;
  FormulaId formula = FormulaId::MertensProduct;
  std::vector<std::pair<std::string, std::string>> inputs;
};

/// Exact rational value of prod_{r <= y} (1 - 1/r)^-1 over primes r.
mpq_class mertens_product_exact(std::uint64_t y);

/// Same product as a real: exact rational for y <= 10^4, compensated sum of
/// logarithms above.  DomainError for y < 2.
long double mertens_product(std::uint64_t y);

/// c_n = P(2n)/(n-1).  DomainError unless n is an odd prime.
mpq_class c_n_exact(std::uint64_t n);
long double c_n(std::uint64_t n);

/// c_n (n-2) x / ((n-1) ln(x)^2).  DomainError for x <= e.
RealEstimate expected_count_fixed_n(std::uint64_t n, long double x);

/// 15 x / (16 ln(x)^2), the n = 3 case.
RealEstimate expected_count_n3(long double x);

/// e^gamma (ln x - ln(p-1)) / ln p, or e^gamma ln x / ln p when simplified.
/// DomainError if p is not prime or x < p - 1.
RealEstimate expected_count_fixed_p(std::uint64_t p, long double x, bool simplified = false);

/// e^gamma ln(2n) / (n ln p - ln(p-1)).  DomainError for n < 3.
RealEstimate prime_probability_fixed_p(std::uint64_t p, std::uint64_t n);

struct PolyaProducts {
  long double full = 0;       // prod_{r <= x} (1 - 1/r)
  long double sqrt = 0;       // over r <= x^(1/2)
  long double magic_mu = 0;   // over r <= x^mu
  long double reference = 0;  // 1 / ln x
};

/// DomainError for x < 4.
PolyaProducts polya_products(long double x);

/// 2 prod_{3 <= r <= r_max} r(r-2)/(r-1)^2.  DomainError for r_max < 3.
RealEstimate twin_prime_constant(std::uint64_t r_max);

/// mpq -> long double with a 64-bit mantissa (mpq_get_d stops at 53).
long double to_long_double(const mpq_class& q);

}  // namespace projprime::heuristics
