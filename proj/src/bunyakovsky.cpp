#include "projprime/bunyakovsky.hpp"

#include <algorithm>
#include <optional>

#include "projprime/errors.hpp"
#include "projprime/parallel.hpp"
#include "projprime/search.hpp"
#include "projprime/sieve.hpp"

namespace projprime::bunyakovsky {

IntPolynomial::IntPolynomial(std::vector<BigInt> coefficients) : c_(std::move(coefficients)) {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

IntPolynomial IntPolynomial::parse(std::string_view text) {
  std::vector<BigInt> coeffs;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    std::string field(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    field.erase(std::remove_if(field.begin(), field.end(), [](char ch) { return ch == ' ' || ch == '\t'; }),
                field.end());
    bool negative = false;
    std::string_view digits = field;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
      negative = digits[0] == '-';
      digits.remove_prefix(1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string_view::npos) {
      throw DomainError("bad polynomial coefficient '" + field + "'");
    }
    BigInt c(std::string(digits), 10);
    coeffs.push_back(negative ? BigInt(-c) : c);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return IntPolynomial(std::move(coeffs));
}

IntPolynomial IntPolynomial::repunit_family(std::uint64_t n) {
  if (n < 1) throw DomainError("repunit family needs n >= 1");
  return IntPolynomial(std::vector<BigInt>(n, BigInt(1)));
}

const BigInt& IntPolynomial::leading() const {
  if (c_.empty()) throw DomainError("zero polynomial has no leading coefficient");
  return c_.back();
}

BigInt IntPolynomial::content() const {
  BigInt g = 0;
  for (const BigInt& c : c_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

BigInt IntPolynomial::operator()(const BigInt& t) const {
  BigInt v = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * t + *it;
  return v;
}

std::string IntPolynomial::to_string() const {
  if (c_.empty()) return "0";
  std::string s;
  for (int k = degree(); k >= 0; --k) {
    const BigInt& c = c_[k];
    if (c == 0) continue;
    const bool neg = c < 0;
    const BigInt mag = abs(c);
    if (s.empty()) {
      if (neg) s += "-";
    } else {
      s += neg ? " - " : " + ";
    }
    if (mag != 1 || k == 0) s += mag.get_str();
    if (k >= 1) s += "t";
    if (k >= 2) s += "^" + std::to_string(k);
  }
  return s;
}

bool divides_all_values(const IntPolynomial& f, const BigInt& p) {
  if (!arith::is_prime(p).is_prime()) throw DomainError("divides_all_values: " + to_decimal(p) + " is not prime");
  const auto& c = f.coefficients();
  if (fits_u64(p) && to_u64(p) <= static_cast<std::uint64_t>(std::max(f.degree(), 0))) {
    const std::uint64_t pw = to_u64(p);
    std::vector<std::uint64_t> h(pw, 0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      const std::uint64_t r = mpz_fdiv_ui(c[k].get_mpz_t(), pw);
      const std::size_t idx = k < pw ? k : (k - 1) % (pw - 1) + 1;
      h[idx] = (h[idx] + r) % pw;
    }
    return std::all_of(h.begin(), h.end(), [](std::uint64_t v) { return v == 0; });
  }
  return std::all_of(c.begin(), c.end(), [&](const BigInt& v) { return mpz_divisible_p(v.get_mpz_t(), p.get_mpz_t()) != 0; });
}

namespace {

constexpr std::uint64_t kTrialLimit = 1000000;

/// Prime factors of v > 0 by trial division to 10^6; a cofactor without
/// small factors is returned separately.
std::vector<BigInt> small_factors(BigInt v, BigInt& cofactor) {
  std::vector<BigInt> out;
  for (std::uint64_t d = 2; d <= kTrialLimit; d += (d == 2 ? 1 : 2)) {
    if (BigInt(d) * d > v) break;
    if (mpz_divisible_ui_p(v.get_mpz_t(), d)) {
      out.push_back(BigInt(d));
      while (mpz_divisible_ui_p(v.get_mpz_t(), d)) mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), d);
    }
  }
  cofactor = v;
  return out;
}

std::optional<std::vector<std::uint64_t>> divisors_of(const BigInt& v) {
  if (v <= 0 || v > BigInt(1) << 40) return std::nullopt;
  const std::uint64_t n = to_u64(v);
  std::vector<std::uint64_t> small, large;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    small.push_back(d);
    if (d * d != n) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

/// f divided by (s t - r), assuming r/s is a root; exact in Z[t] by Gauss.
IntPolynomial divide_linear(const IntPolynomial& f, const BigInt& r, const BigInt& s) {
  std::vector<BigInt> cur = f.coefficients();
  const int d = f.degree();
  std::vector<BigInt> q(d);
  for (int k = d; k >= 1; --k) {
    q[k - 1] = cur[k] / s;
    cur[k - 1] += q[k - 1] * r;
  }
  return IntPolynomial(std::move(q));
}

IntPolynomial linear(const BigInt& r, const BigInt& s) { return IntPolynomial({BigInt(-r), s}); }

/// A rational root r/s (s > 0) of a primitive polynomial, searched over
/// r | c_0 and s | lead.  nullopt when the search was not possible.
std::optional<std::optional<std::pair<BigInt, BigInt>>> rational_root(const IntPolynomial& f) {
  const auto& c = f.coefficients();
  auto rs = divisors_of(abs(c.front()));
  auto ss = divisors_of(abs(f.leading()));
  if (!rs || !ss) return std::nullopt;
  for (std::uint64_t sv : *ss) {
    for (std::uint64_t rv : *rs) {
      for (int sign : {1, -1}) {
        const BigInt r = BigInt(sign) * from_u64(rv);
        const BigInt s = from_u64(sv);
        BigInt g;
        mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), s.get_mpz_t());
        if (g != 1) continue;
        // s^d f(r/s) = sum c_k r^k s^(d-k)
        BigInt acc = 0, rp = 1;
        std::vector<BigInt> spow(c.size(), BigInt(1));
        for (std::size_t k = 1; k < c.size(); ++k) spow[k] = spow[k - 1] * s;
        for (std::size_t k = 0; k < c.size(); ++k) {
          acc += c[k] * rp * spow[c.size() - 1 - k];
          rp *= r;
        }
        if (acc == 0) return std::optional<std::pair<BigInt, BigInt>>(std::pair{r, s});
      }
    }
  }
  return std::optional<std::pair<BigInt, BigInt>>();
}

std::string factor_witness(const IntPolynomial& a, const IntPolynomial& b) {
  return "(" + a.to_string() + ") * (" + b.to_string() + ")";
}

}  // namespace

std::vector<BigInt> prime_fixed_divisors(const IntPolynomial& f) {
  if (f.is_zero()) throw DomainError("prime_fixed_divisors: zero polynomial");
  BigInt v0 = 0;
  for (int k = 0; k <= f.degree() && v0 == 0; ++k) v0 = abs(f(BigInt(k)));

  BigInt rest;
  std::vector<BigInt> candidates = small_factors(v0, rest);
  if (rest > 1) {
    if (rest <= BigInt(kTrialLimit) * kTrialLimit || arith::is_prime(rest).is_prime()) {
      candidates.push_back(rest);
    } else {
      // Every prime factor of rest exceeds 10^6 > deg f, so it divides all
      // values only if it divides the content.
      BigInt g;
      const BigInt content = f.content();
      mpz_gcd(g.get_mpz_t(), rest.get_mpz_t(), content.get_mpz_t());
      if (g > 1) {
        if (!arith::is_prime(g).is_prime()) throw DomainError("prime_fixed_divisors: cannot factor " + to_decimal(g));
        candidates.push_back(g);
      }
    }
  }

  std::vector<BigInt> out;
  for (const BigInt& p : candidates) {
    if (divides_all_values(f, p)) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

BigInt fixed_divisor(const IntPolynomial& f) {
  if (f.is_zero()) throw DomainError("fixed_divisor: zero polynomial");
  BigInt g = 0;
  for (int k = 0; k <= f.degree(); ++k) {
    const BigInt v = f(BigInt(k));
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  return g;
}

std::string_view tri_name(Tri t) {
  switch (t) {
    case Tri::Yes: return "yes";
    case Tri::No: return "no";
    case Tri::Unknown: return "unknown";
  }
  return "?";
}

Report bunyakovsky_report(const IntPolynomial& f) {
  if (f.is_zero()) throw DomainError("bunyakovsky_report: zero polynomial");
  Report rep;
  rep.leading_positive = f.leading() > 0;
  rep.fixed_divisor = fixed_divisor(f);

  const int d = f.degree();
  const auto& c = f.coefficients();
  const BigInt content = f.content();
  const bool repunit_shape = d >= 1 && std::all_of(c.begin(), c.end(), [](const BigInt& v) { return v == 1; });

  if (d == 0) {
    rep.irreducible = Tri::No;
    rep.factorization = "constant polynomial";
  } else if (content > 1) {
    std::vector<BigInt> prim(c);
    for (BigInt& v : prim) v /= content;
    rep.irreducible = Tri::No;
    rep.factorization = content.get_str() + " * (" + IntPolynomial(prim).to_string() + ")";
  } else if (repunit_shape) {
    const std::uint64_t n = static_cast<std::uint64_t>(d) + 1;
    if (arith::is_prime_u64(n)) {
      rep.irreducible = Tri::Yes;
    } else {
      const std::uint64_t k = arith::smallest_factor_u64(n);
      std::vector<BigInt> outer(n - k + 1, BigInt(0));
      for (std::uint64_t i = 0; i < n; i += k) outer[i] = 1;
      rep.irreducible = Tri::No;
      rep.factorization = factor_witness(IntPolynomial::repunit_family(k), IntPolynomial(outer));
    }
  } else if (d == 1) {
    rep.irreducible = Tri::Yes;
  } else if (c[0] == 0) {
    rep.irreducible = Tri::No;
    rep.factorization = factor_witness(IntPolynomial({BigInt(0), BigInt(1)}),
                                       IntPolynomial(std::vector<BigInt>(c.begin() + 1, c.end())));
  } else if (d == 2) {
    const BigInt disc = c[1] * c[1] - 4 * c[2] * c[0];
    if (disc >= 0 && mpz_perfect_square_p(disc.get_mpz_t())) {
      BigInt root;
      mpz_sqrt(root.get_mpz_t(), disc.get_mpz_t());
      BigInt r = -c[1] + root, s = 2 * c[2];
      if (s < 0) {
        r = -r;
        s = -s;
      }
      BigInt g;
      mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), s.get_mpz_t());
      r /= g;
      s /= g;
      rep.irreducible = Tri::No;
      rep.factorization = factor_witness(linear(r, s), divide_linear(f, r, s));
    } else {
      rep.irreducible = Tri::Yes;
    }
  } else if (d == 3) {
    if (auto root = rational_root(f); !root) {
      rep.irreducible = Tri::Unknown;
    } else if (*root) {
      const auto& [r, s] = **root;
      rep.irreducible = Tri::No;
      rep.factorization = factor_witness(linear(r, s), divide_linear(f, r, s));
    } else {
      rep.irreducible = Tri::Yes;
    }
  }

  if (!rep.leading_positive || rep.irreducible == Tri::No || rep.fixed_divisor != 1) {
    rep.satisfies = Tri::No;
  } else {
    rep.satisfies = rep.irreducible;
  }
  return rep;
}

std::string_view domain_name(ValueDomain d) {
  switch (d) {
    case ValueDomain::Naturals: return "naturals";
    case ValueDomain::Primes: return "primes";
    case ValueDomain::PrimePowers: return "prime-powers";
  }
  return "?";
}

ValueDomain parse_domain(std::string_view name) {
  if (name == "naturals") return ValueDomain::Naturals;
  if (name == "primes") return ValueDomain::Primes;
  if (name == "prime-powers" || name == "prime_powers") return ValueDomain::PrimePowers;
  throw DomainError("unknown domain '" + std::string(name) + "'");
}

namespace {

constexpr std::uint64_t kChunk = 1 << 16;

class Evaluator {
 public:
  Evaluator(const IntPolynomial& f, const arith::WitnessPolicy& policy) : f_(f), policy_(policy) {
    small_ = std::all_of(f.coefficients().begin(), f.coefficients().end(),
                         [](const BigInt& v) { return v.fits_slong_p(); });
    if (small_) {
      for (const BigInt& v : f.coefficients()) w_.push_back(v.get_si());
    }
    const BigInt limit = BigInt(1) << 64;
    const BigInt& th = policy.deterministic_threshold;
    word_limit_ = th >= limit ? ~static_cast<unsigned __int128>(0) >> 1 : static_cast<unsigned __int128>(to_u64(th));
  }

  bool prime_at(std::uint64_t t) const {
    if (small_) {
      if (auto v = eval_i128(t)) {
        if (*v < 2) return false;
        const auto u = static_cast<unsigned __int128>(*v);
        if (u < word_limit_ && u >> 64 == 0) return arith::is_prime_u64(static_cast<std::uint64_t>(u));
      }
    }
    const BigInt v = f_(from_u64(t));
    return v >= 2 && arith::is_prime(v, policy_).is_prime();
  }

 private:
  std::optional<__int128> eval_i128(std::uint64_t t) const {
    __int128 v = 0;
    const __int128 tt = t;
    for (auto it = w_.rbegin(); it != w_.rend(); ++it) {
      if (__builtin_mul_overflow(v, tt, &v)) return std::nullopt;
      if (__builtin_add_overflow(v, static_cast<__int128>(*it), &v)) return std::nullopt;
    }
    return v;
  }

  const IntPolynomial& f_;
  const arith::WitnessPolicy& policy_;
  bool small_ = false;
  std::vector<long> w_;
  unsigned __int128 word_limit_ = 0;
};

struct ChunkResult {
  std::uint64_t tested = 0;
  std::uint64_t primes = 0;
  std::vector<std::uint64_t> hits;
};

}  // namespace

CountResult count_prime_values(const IntPolynomial& f, std::uint64_t t_max, ValueDomain domain,
                               const arith::WitnessPolicy& policy, const CountOptions& options) {
  policy.validate();
  CountResult result;
  if (f.is_zero() || options.t_min > t_max) return result;
  if (t_max >= (std::uint64_t{1} << 62)) throw DomainError("count_prime_values: t_max too large");

  std::vector<std::uint64_t> higher_powers;  // p^e <= t_max with e >= 2
  if (domain == ValueDomain::PrimePowers) {
    std::uint64_t root = 1;
    while ((root + 1) * (root + 1) <= t_max) ++root;
    for (std::uint64_t p : arith::primes_up_to(root)) {
      for (std::uint64_t q = p * p;; q *= p) {
        higher_powers.push_back(q);
        if (q > t_max / p) break;
      }
    }
    std::sort(higher_powers.begin(), higher_powers.end());
  }

  const Evaluator eval(f, policy);
  const std::uint64_t lo0 = options.t_min, end = t_max + 1;
  const std::uint64_t chunks = (end - lo0 + kChunk - 1) / kChunk;
  std::vector<ChunkResult> parts(chunks);

  parallel_for(chunks, search::resolve_workers(options.workers), [&](std::size_t i) {
    const std::uint64_t lo = lo0 + i * kChunk, hi = std::min(end, lo + kChunk);
    ChunkResult& part = parts[i];
    std::vector<std::uint64_t> ts;
    if (domain == ValueDomain::Naturals) {
      for (std::uint64_t t = lo; t < hi; ++t) ts.push_back(t);
    } else {
      ts = arith::sieve_segment(lo, hi);
      if (domain == ValueDomain::PrimePowers) {
        auto a = std::lower_bound(higher_powers.begin(), higher_powers.end(), lo);
        auto b = std::lower_bound(higher_powers.begin(), higher_powers.end(), hi);
        ts.insert(ts.end(), a, b);
        std::sort(ts.begin(), ts.end());
      }
    }
    for (std::uint64_t t : ts) {
      ++part.tested;
      if (eval.prime_at(t)) {
        ++part.primes;
        if (options.collect_hits) part.hits.push_back(t);
      }
    }
  });

  for (ChunkResult& part : parts) {
    result.tested += part.tested;
    result.primes += part.primes;
    result.hits.insert(result.hits.end(), part.hits.begin(), part.hits.end());
  }
  return result;
}

namespace reference {

std::uint64_t count_prime_values(const IntPolynomial& f, std::uint64_t t_max, ValueDomain domain,
                                 const arith::WitnessPolicy& policy, std::uint64_t t_min) {
  std::uint64_t count = 0;
  for (std::uint64_t t = t_min; t <= t_max; ++t) {
    if (domain == ValueDomain::Primes && !arith::is_prime_u64(t)) continue;
    if (domain == ValueDomain::PrimePowers && !search::is_prime_power(t)) continue;
    const BigInt v = f(from_u64(t));
    if (v >= 2 && arith::is_prime(v, policy).is_prime()) ++count;
  }
  return count;
}

}  // namespace reference

}  // namespace projprime::bunyakovsky
