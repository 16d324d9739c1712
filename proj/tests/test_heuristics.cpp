#include <doctest.h>

#include <cmath>

#include "projprime/arith.hpp"
#include "projprime/errors.hpp"
#include "projprime/heuristics.hpp"
#include "projprime/sieve.hpp"

using namespace projprime;
using namespace projprime::heuristics;

namespace {

bool close_rel(long double a, long double b, long double tol) { return std::fabs(a - b) <= tol * std::fabs(b); }

}  // namespace

TEST_SUITE("heuristics") {

TEST_CASE("constants") {
  CHECK(std::fabs(mu() * e_gamma() - 1.0L) < 1e-18L);
  CHECK(static_cast<double>(mu()) == doctest::Approx(0.561459483566885).epsilon(1e-14));
  CHECK(static_cast<double>(e_gamma()) == doctest::Approx(1.781072417990198).epsilon(1e-14));
  CHECK(static_cast<double>(2 * mu()) == doctest::Approx(1.122918).epsilon(1e-6));
  CHECK(formula_name(FormulaId::ExpectedFixedP) == "fixed-p");
  CHECK(formula_name(FormulaId::TwinPrimeConstant) == "twin-constant");
}

TEST_CASE("mertens product") {
  CHECK(mertens_product_exact(2) == 2);
  CHECK(mertens_product_exact(6) == mpq_class(15, 4));
  CHECK(mertens_product(2) == 2.0L);
  CHECK(mertens_product(6) == 3.75L);
  CHECK_THROWS_AS(mertens_product(1), DomainError);
  CHECK_THROWS_AS(mertens_product_exact(0), DomainError);
  const long double y = 1e6L;
  CHECK(close_rel(mertens_product(1000000) * mu() / std::log(y), 1.0L, 0.05L));

  // Constant between primes, strictly larger at each prime.
  mpq_class prev = mertens_product_exact(2);
  for (std::uint64_t k = 3; k <= 300; ++k) {
    const mpq_class cur = mertens_product_exact(k);
    if (arith::is_prime(BigInt(static_cast<unsigned long>(k))).is_prime()) {
      CHECK(cur > prev);
      CHECK(cur == prev * mpq_class(k, k - 1));
    } else {
      CHECK(cur == prev);
    }
    prev = cur;
  }
  // The real path above 10^4 continues the exact one smoothly.
  const long double exact = to_long_double(mertens_product_exact(10007));
  CHECK(close_rel(mertens_product(10007), exact, 1e-15L));
  CHECK(mertens_product(10000) <= mertens_product(10007));
}

TEST_CASE("c_n") {
  CHECK(c_n_exact(3) == mpq_class(15, 8));
  CHECK(c_n_exact(5) == mpq_class(35, 32));
  CHECK(c_n_exact(7) == mpq_class(1001, 1152));
  for (std::uint64_t n : {3, 5, 7, 11, 13, 97}) CHECK(c_n_exact(n) * (n - 1) == mertens_product_exact(2 * n));
  CHECK(c_n(3) == 1.875L);
  CHECK_THROWS_AS(c_n_exact(9), DomainError);
  CHECK_THROWS_AS(c_n_exact(2), DomainError);
}

TEST_CASE("fixed n expectation") {
  const long double e10 = expected_count_fixed_n(3, 1e10L).value;
  CHECK(e10 == doctest::Approx(1.7683e7).epsilon(5e-5));
  CHECK(expected_count_fixed_n(3, 1e11L).value == doctest::Approx(1.4614e8).epsilon(5e-5));
  for (long double x : {10.0L, 1e3L, 1e6L, 3.3e10L, 1e15L}) {
    const long double l = std::log(x);
    CHECK(close_rel(expected_count_fixed_n(3, x).value * 16 * l * l / (15 * x), 1.0L, 1e-17L));
    CHECK(close_rel(expected_count_n3(x).value / expected_count_fixed_n(3, x).value, 1.0L, 1e-17L));
  }
  // n = 5: c_5 * 3 / 4 = 105/128.
  CHECK(close_rel(expected_count_fixed_n(5, 1e6L).value, 105.0L / 128 * 1e6L / std::pow(std::log(1e6L), 2), 1e-17L));
  CHECK_THROWS_AS(expected_count_fixed_n(3, 2.7L), DomainError);
  CHECK_THROWS_AS(expected_count_n3(1.0L), DomainError);
  CHECK_THROWS_AS(expected_count_fixed_n(4, 100.0L), DomainError);
  const RealEstimate r = expected_count_fixed_n(3, 1e6L);
  CHECK(r.formula == FormulaId::ExpectedFixedN);
  CHECK_FALSE(r.inputs.empty());
  CHECK(std::isfinite(r.value));
}

TEST_CASE("fixed p expectation") {
  const long double eg = e_gamma();
  for (std::uint64_t p : {3, 5, 7, 11, 13, 17}) {
    const long double oracle = eg * (std::log(1e4L) - std::log(static_cast<long double>(p - 1))) / std::log((long double)p);
    CHECK(close_rel(expected_count_fixed_p(p, 1e4L).value, oracle, 1e-17L));
    const long double simple = eg * std::log(1e4L) / std::log((long double)p);
    CHECK(close_rel(expected_count_fixed_p(p, 1e4L, true).value, simple, 1e-17L));
    CHECK(expected_count_fixed_p(p, 1e4L, true).formula == FormulaId::ExpectedFixedPSimplified);
  }
  CHECK(expected_count_fixed_p(3, 1e4L).value == doctest::Approx(13.808090).epsilon(1e-6));
  CHECK(expected_count_fixed_p(17, 2.0L * 8).value == 0.0L);
  CHECK(expected_count_fixed_p(3, 2.0L).value == 0.0L);
  CHECK(close_rel(expected_count_fixed_p(2, 1e4L).value, eg * std::log(1e4L) / std::log(2.0L), 1e-17L));
  CHECK_THROWS_AS(expected_count_fixed_p(3, 1.5L), DomainError);
  CHECK_THROWS_AS(expected_count_fixed_p(9, 100.0L), DomainError);
}

TEST_CASE("fixed p probability") {
  const long double eg = e_gamma();
  CHECK(close_rel(prime_probability_fixed_p(3, 3).value, eg * std::log(6.0L) / (3 * std::log(3.0L) - std::log(2.0L)), 1e-17L));
  long double sum = 0;
  for (std::uint64_t n : arith::primes_up_to(10000))
    if (n >= 3) sum += prime_probability_fixed_p(3, n).value;
  CHECK(close_rel(sum, expected_count_fixed_p(3, 1e4L).value, 0.10L));
  long double prev = prime_probability_fixed_p(5, 5).value;
  for (std::uint64_t n : arith::primes_up_to(2000)) {
    if (n <= 5) continue;
    const long double cur = prime_probability_fixed_p(5, n).value;
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK_THROWS_AS(prime_probability_fixed_p(3, 2), DomainError);
}

TEST_CASE("polya products") {
  const PolyaProducts pp = polya_products(1e6L);
  CHECK(close_rel(pp.reference, 1.0L / std::log(1e6L), 1e-18L));
  CHECK(close_rel(pp.full / pp.reference, mu(), 0.05L));
  CHECK(close_rel(pp.sqrt / pp.reference, 2 * mu(), 0.05L));
  CHECK(close_rel(pp.magic_mu / pp.reference, 1.0L, 0.05L));
  CHECK(close_rel(pp.full, 1.0L / mertens_product(1000000), 1e-15L));
  CHECK(close_rel(pp.sqrt, 1.0L / mertens_product(1000), 1e-15L));
  const PolyaProducts four = polya_products(4.0L);
  CHECK(close_rel(four.full, 1.0L / 3, 1e-18L));   // (1/2)(2/3)
  CHECK(close_rel(four.sqrt, 0.5L, 1e-18L));
  CHECK_THROWS_AS(polya_products(3.9L), DomainError);
}

TEST_CASE("twin prime constant") {
  CHECK(twin_prime_constant(3).value == 1.5L);
  CHECK(twin_prime_constant(4).value == 1.5L);
  CHECK(std::fabs(twin_prime_constant(1000000).value - 1.320323632L) < 1e-3L);
  long double prev = twin_prime_constant(3).value;
  for (std::uint64_t r : {5, 7, 100, 1000, 100000}) {
    const long double cur = twin_prime_constant(r).value;
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK_THROWS_AS(twin_prime_constant(2), DomainError);
}

TEST_CASE("real outputs are reproducible") {
  CHECK(mertens_product(123457) == mertens_product(123457));
  CHECK(twin_prime_constant(99991).value == twin_prime_constant(99991).value);
  const PolyaProducts a = polya_products(5e5L), b = polya_products(5e5L);
  CHECK(a.magic_mu == b.magic_mu);
}

TEST_CASE("rational to long double keeps the extended mantissa") {
  const long double third = to_long_double(mpq_class(1, 3));
  CHECK(std::fabs(third - 1.0L / 3) <= 1e-19L);
  CHECK(to_long_double(mpq_class(-7, 2)) == -3.5L);
  CHECK(to_long_double(mpq_class(0)) == 0.0L);
}

}  // TEST_SUITE
