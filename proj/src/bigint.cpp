#include "projprime/bigint.hpp"

#include <cctype>
#include <limits>

#include "projprime/errors.hpp"

namespace projprime {

namespace {

BigInt parse_plain(std::string_view text, std::string_view whole) {
  if (text.empty()) throw DomainError("empty integer in '" + std::string(whole) + "'");
  std::string digits;
  for (char c : text) {
    if (c == '_' || c == '\'') continue;
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw DomainError("not a nonnegative integer: '" + std::string(whole) + "'");
    }
    digits.push_back(c);
  }
  if (digits.empty()) throw DomainError("not a nonnegative integer: '" + std::string(whole) + "'");
  return BigInt(digits, 10);
}

}  // namespace

BigInt from_u64(std::uint64_t v) {
  BigInt r;
  mpz_import(r.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return r;
}

BigInt parse_bigint(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);

  if (auto caret = text.find('^'); caret != std::string_view::npos) {
    BigInt base = parse_plain(text.substr(0, caret), text);
    BigInt exp = parse_plain(text.substr(caret + 1), text);
    if (!exp.fits_ulong_p() || exp > 1'000'000) throw DomainError("exponent too large in '" + std::string(text) + "'");
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp.get_ui());
    return r;
  }
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    BigInt mant = parse_plain(text.substr(0, e), text);
    BigInt exp = parse_plain(text.substr(e + 1), text);
    if (!exp.fits_ulong_p() || exp > 1'000'000) throw DomainError("exponent too large in '" + std::string(text) + "'");
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, exp.get_ui());
    return mant * r;
  }
  return parse_plain(text, text);
}

std::uint64_t parse_u64(std::string_view text) {
  BigInt v = parse_bigint(text);
  if (!fits_u64(v)) throw DomainError("value does not fit 64 bits: '" + std::string(text) + "'");
  return to_u64(v);
}

std::string to_decimal(const BigInt& v) { return v.get_str(10); }

std::size_t decimal_digits(const BigInt& v) {
  if (v == 0) return 1;
  std::string s = v.get_str(10);
  return s.front() == '-' ? s.size() - 1 : s.size();
}

bool fits_u64(const BigInt& v) { return sgn(v) >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 64; }

std::uint64_t to_u64(const BigInt& v) {
  if (!fits_u64(v)) throw DomainError("value does not fit 64 bits");
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

std::string canonical_bytes(const BigInt& v) {
  std::size_t count = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  std::string out(count, '\0');
  if (sgn(v) != 0) mpz_export(out.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
  out.resize(count);
  return out;
}

}  // namespace projprime
