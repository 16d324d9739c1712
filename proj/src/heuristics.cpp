#include "projprime/heuristics.hpp"

#include <cmath>
#include <numbers>

#include "projprime/arith.hpp"
#include "projprime/errors.hpp"
#include "projprime/sieve.hpp"

namespace projprime::heuristics {

namespace {

constexpr std::uint64_t kExactLimit = 10000;

/// Neumaier-compensated summation; fixed order gives bit-identical results.
class CompensatedSum {
 public:
  void add(long double v) {
    const long double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0;
  long double comp_ = 0;
};

/// sum over primes r <= y of ln(1 - 1/r).
long double log_euler_product(std::uint64_t y) {
  CompensatedSum s;
  arith::for_each_prime(2, y + 1, [&](std::uint64_t r) { s.add(std::log1p(-1.0L / static_cast<long double>(r))); });
  return s.value();
}

std::uint64_t floor_u64(long double v) { return v < 0 ? 0 : static_cast<std::uint64_t>(std::floor(v)); }

std::string fmt_ld(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.21Lg", v);
  return buf;
}

void require_prime(std::uint64_t p, const char* what) {
  if (!arith::is_prime_u64(p)) throw DomainError(std::string(what) + ": " + std::to_string(p) + " is not prime");
}

}  // namespace

long double e_gamma() { return std::exp(kGamma); }
long double mu() { return std::exp(-kGamma); }

std::string_view formula_name(FormulaId id) {
  switch (id) {
    case FormulaId::MertensProduct: return "mertens-product";
    case FormulaId::CN: return "c_n";
    case FormulaId::ExpectedFixedN: return "fixed-n";
    case FormulaId::ExpectedN3: return "n3";
    case FormulaId::ExpectedFixedP: return "fixed-p";
    case FormulaId::ExpectedFixedPSimplified: return "fixed-p-simplified";
    case FormulaId::ProbabilityFixedP: return "fixed-p-probability";
    case FormulaId::PolyaFull: return "polya-full";
    case FormulaId::PolyaSqrt: return "polya-sqrt";
    case FormulaId::PolyaMagicMu: return "polya-magic-mu";
    case FormulaId::PolyaReference: return "polya-reference";
    case FormulaId::TwinPrimeConstant: return "twin-constant";
  }
  return "?";
}

long double to_long_double(const mpq_class& q) {
  if (q == 0) return 0;
  mpz_class num = abs(q.get_num());
  const mpz_class& den = q.get_den();
  // Scale so the integer quotient carries 66 bits.
  const long shift = 66 - static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) +
                     static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
  if (shift > 0) {
    num <<= shift;
  } else {
    num >>= -shift;
  }
  const mpz_class quo = num / den;
  const std::uint64_t lo = mpz_getlimbn(quo.get_mpz_t(), 0);
  const std::uint64_t hi = mpz_size(quo.get_mpz_t()) > 1 ? mpz_getlimbn(quo.get_mpz_t(), 1) : 0;
  long double v = std::ldexp(static_cast<long double>(hi), 64) + static_cast<long double>(lo);
  v = std::ldexp(v, static_cast<int>(-shift));
  return q < 0 ? -v : v;
}

mpq_class mertens_product_exact(std::uint64_t y) {
  if (y < 2) throw DomainError("mertens_product: y must be >= 2");
  mpz_class num = 1, den = 1;
  arith::for_each_prime(2, y + 1, [&](std::uint64_t r) {
    num *= static_cast<unsigned long>(r);
    den *= static_cast<unsigned long>(r - 1);
  });
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

long double mertens_product(std::uint64_t y) {
  if (y < 2) throw DomainError("mertens_product: y must be >= 2");
  if (y <= kExactLimit) return to_long_double(mertens_product_exact(y));
  return std::exp(-log_euler_product(y));
}

mpq_class c_n_exact(std::uint64_t n) {
  if (n < 3) throw DomainError("c_n: n must be an odd prime");
  require_prime(n, "c_n");
  mpq_class q = mertens_product_exact(2 * n) / mpq_class(static_cast<unsigned long>(n - 1));
  q.canonicalize();
  return q;
}

long double c_n(std::uint64_t n) { return to_long_double(c_n_exact(n)); }

RealEstimate expected_count_fixed_n(std::uint64_t n, long double x) {
  if (!(x > std::numbers::e_v<long double>)) throw DomainError("expected_count_fixed_n: x must exceed e");
  const long double cn = c_n(n);
  const long double lx = std::log(x);
  const long double v = cn * static_cast<long double>(n - 2) * x / (static_cast<long double>(n - 1) * lx * lx);
  return {v, FormulaId::ExpectedFixedN, {{"n", std::to_string(n)}, {"x", fmt_ld(x)}}};
}

RealEstimate expected_count_n3(long double x) {
  if (!(x > std::numbers::e_v<long double>)) throw DomainError("expected_count_n3: x must exceed e");
  const long double lx = std::log(x);
  return {15.0L * x / (16.0L * lx * lx), FormulaId::ExpectedN3, {{"x", fmt_ld(x)}}};
}

RealEstimate expected_count_fixed_p(std::uint64_t p, long double x, bool simplified) {
  require_prime(p, "expected_count_fixed_p");
  const long double pm1 = static_cast<long double>(p - 1);
  if (!(x >= pm1) || !(x > 0)) throw DomainError("expected_count_fixed_p: x must be >= p - 1");
  const long double lp = std::log(static_cast<long double>(p));
  RealEstimate r;
  r.inputs = {{"p", std::to_string(p)}, {"x", fmt_ld(x)}};
  if (simplified) {
    r.value = e_gamma() * std::log(x) / lp;
    r.formula = FormulaId::ExpectedFixedPSimplified;
  } else {
    r.value = e_gamma() * (std::log(x) - std::log(pm1)) / lp;
    r.formula = FormulaId::ExpectedFixedP;
  }
  return r;
}

RealEstimate prime_probability_fixed_p(std::uint64_t p, std::uint64_t n) {
  require_prime(p, "prime_probability_fixed_p");
  if (n < 3) throw DomainError("prime_probability_fixed_p: n must be >= 3");
  const long double nn = static_cast<long double>(n);
  const long double v = e_gamma() * std::log(2.0L * nn) /
                        (nn * std::log(static_cast<long double>(p)) - std::log(static_cast<long double>(p - 1)));
  return {v, FormulaId::ProbabilityFixedP, {{"p", std::to_string(p)}, {"n", std::to_string(n)}}};
}

PolyaProducts polya_products(long double x) {
  if (!(x >= 4)) throw DomainError("polya_products: x must be >= 4");
  PolyaProducts out;
  out.full = std::exp(log_euler_product(floor_u64(x)));
  out.sqrt = std::exp(log_euler_product(floor_u64(std::sqrt(x))));
  out.magic_mu = std::exp(log_euler_product(floor_u64(std::pow(x, mu()))));
  out.reference = 1.0L / std::log(x);
  return out;
}

RealEstimate twin_prime_constant(std::uint64_t r_max) {
  if (r_max < 3) throw DomainError("twin_prime_constant: r_max must be >= 3");
  CompensatedSum s;
  arith::for_each_prime(3, r_max + 1, [&](std::uint64_t r) {
    const long double d = static_cast<long double>(r - 1);
    s.add(std::log1p(-1.0L / (d * d)));
  });
  return {2.0L * std::exp(s.value()), FormulaId::TwinPrimeConstant, {{"r_max", std::to_string(r_max)}}};
}

}  // namespace projprime::heuristics
