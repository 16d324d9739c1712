#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace projprime {

/// 64-bit FNV-1a, used for checkpoint checksums and config digests.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// 128-bit FNV-1a; keys the collision multimap.
struct Digest128 {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;
  friend bool operator==(const Digest128&, const Digest128&) = default;
};
Digest128 fnv1a128(std::string_view bytes);

struct Digest128Hash {
  std::size_t operator()(const Digest128& d) const noexcept { return d.lo ^ (d.hi * 0x9e3779b97f4a7c15ULL); }
};

std::string hex64(std::uint64_t v);

/// splitmix64 finalizer; the counter-mode generator behind random witnesses.
std::uint64_t mix64(std::uint64_t x);

}  // namespace projprime
