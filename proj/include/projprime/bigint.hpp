#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace projprime {

/// Unbounded integer carrier for m, q and p.  Values are kept nonnegative
/// by the callers; IntPolynomial is the only place signed values appear.
using BigInt = mpz_class;

BigInt from_u64(std::uint64_t v);

/// Parses a decimal integer, also accepting the shorthands `1e6`, `10^9`
/// and `2^60`.  Throws DomainError on malformed input.
BigInt parse_bigint(std::string_view text);

/// Same as parse_bigint but the result must fit an unsigned 64-bit word.
std::uint64_t parse_u64(std::string_view text);

std::string to_decimal(const BigInt& v);

/// Number of decimal digits of |v| (exact, unlike mpz_sizeinbase).
std::size_t decimal_digits(const BigInt& v);

bool fits_u64(const BigInt& v);
std::uint64_t to_u64(const BigInt& v);

/// Big-endian magnitude bytes, the canonical encoding used for hashing.
std::string canonical_bytes(const BigInt& v);

}  // namespace projprime
