#pragma once

// Search drivers.  Work is split into segments of the search axis; each
// segment is handled by one OpenMP worker and results are folded strictly in
// segment order, so summaries do not depend on the worker count.  Long runs
// checkpoint after every batch of segments and can be resumed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "projprime/arith.hpp"
#include "projprime/bigint.hpp"
#include "projprime/projective.hpp"

namespace projprime::search {

struct SegmentRecord {
  std::uint64_t segment_index = 0;
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::uint64_t primes_seen = 0;
  std::uint64_t projective_hits = 0;
  std::optional<std::uint64_t> max_hit_p;

  friend bool operator==(const SegmentRecord&, const SegmentRecord&) = default;
};

struct Hit {
  std::uint64_t p = 0;
  unsigned e = 1;
  std::uint64_t n = 0;
  std::size_t digits = 0;
  std::string m;  // decimal m, filled only when RunControl::emit_m is set

  friend bool operator==(const Hit&, const Hit&) = default;
};

enum class Mode { FixedN, Grid };

std::string mode_name(Mode mode);
Mode parse_mode(const std::string& name);

struct SearchParams {
  Mode mode = Mode::FixedN;
  std::string canonical;  // "key=value;..." without commas
  std::uint64_t policy_digest = 0;

  std::uint64_t digest() const;
  friend bool operator==(const SearchParams&, const SearchParams&) = default;
};

struct SearchSummary {
  SearchParams params;
  std::uint64_t planned_segments = 0;
  std::vector<SegmentRecord> segments;
  std::uint64_t total_primes = 0;
  std::uint64_t total_hits = 0;
  std::optional<std::uint64_t> max_hit_p;
  std::vector<Hit> hits;  // first RunControl::hit_cap hits
  bool hits_truncated = false;

  bool complete() const { return segments.size() == planned_segments; }
  void recompute_totals();
};

inline constexpr std::size_t kDefaultHitCap = 1'000'000;
inline constexpr std::uint64_t kDefaultSegmentSize = 1'000'000;

struct RunControl {
  int workers = 0;  // <= 0: PROJPRIME_WORKERS, else all processors
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> hit_stream;  // defaults to <checkpoint>.hits
  bool emit_m = false;
  std::optional<std::uint64_t> stop_after_segments;  // stop early, leaving a resumable checkpoint
  std::size_t hit_cap = kDefaultHitCap;
};

int resolve_workers(int requested);

/// Primes p <= p_max with (p^n - 1)/(p - 1) prime.  n must be an odd prime.
SearchSummary search_fixed_n(std::uint64_t n, std::uint64_t p_max, std::uint64_t segment_size,
                             const arith::WitnessPolicy& policy,
                             std::uint64_t trial_bound = projective::kDefaultTrialBound, const RunControl& control = {});

struct FixedPResult {
  std::uint64_t p = 0;
  std::uint64_t n_max = 0;
  std::vector<std::uint64_t> exponents;  // ascending
  std::vector<std::uint64_t> skipped;    // odd primes n dividing p - 1
};

/// Trial bound used when a driver is given 0: admissible divisors are so
/// sparse for large n that a bound growing with n costs almost nothing.
std::uint64_t adaptive_trial_bound(std::uint64_t n);

/// Odd prime exponents n <= n_max with (p^n - 1)/(p - 1) prime.
FixedPResult search_fixed_p(std::uint64_t p, std::uint64_t n_max, const arith::WitnessPolicy& policy,
                            std::uint64_t trial_bound = 0, int workers = 0);

struct PrimePowerQuery {
  BigInt q_max;
  unsigned e_min = 3;
  std::optional<unsigned> e_max;
  std::optional<std::uint64_t> only_p;
  bool include_n2 = false;
};

struct PrimePowerHit {
  projective::PrimePower base;
  std::uint64_t n = 0;
  BigInt m;
};

/// q = p^e <= q_max with e >= e_min, tested for prime n <= e (and n = 2 on
/// request).  Larger n are composite by the E_PRUNE factorisation.
std::vector<PrimePowerHit> search_prime_powers(const PrimePowerQuery& query, const arith::WitnessPolicy& policy,
                                               std::uint64_t trial_bound = 0, int workers = 0);

/// All prime powers q <= q_max against all odd primes n <= n_max.  One
/// segment per exponent n; records span the q-axis [2, q_max].
SearchSummary search_grid(std::uint64_t q_max, std::uint64_t n_max, const arith::WitnessPolicy& policy,
                          std::uint64_t trial_bound = 0, const RunControl& control = {});

/// Odd primes in [3, n_max], the exponent axis of search_grid.
std::vector<std::uint64_t> grid_exponents(std::uint64_t n_max);

enum class CollisionDomain { PrimePowers, AllIntegers };

struct Representation {
  BigInt base;
  std::uint64_t n = 0;
  friend bool operator==(const Representation&, const Representation&) = default;
};

struct CollisionEntry {
  BigInt m;
  std::vector<Representation> representations;  // ordered by n descending
};

/// Values <= m_max written as repunits R(base, n), n >= n_min, in at least
/// two ways.  Exhaustive: for each n every base up to m_max^(1/(n-1)).
std::vector<CollisionEntry> degree_collisions(const BigInt& m_max, CollisionDomain domain, std::uint64_t n_min = 3);

bool is_prime_power(std::uint64_t v);

// Checkpoint file: header line, one comma-separated SegmentRecord per line,
// footer "checksum,<hex FNV-1a of all preceding bytes>".
void checkpoint_write(const SearchSummary& summary, const std::filesystem::path& path);
SearchSummary checkpoint_read(const std::filesystem::path& path);
/// checkpoint_read plus a parameter check; IntegrityError on mismatch.
SearchSummary checkpoint_resume(const std::filesystem::path& path, const SearchParams& expected);

std::string format_record(const SegmentRecord& r);
SegmentRecord parse_record(const std::string& line);
std::string format_hit(const Hit& h);
Hit parse_hit(const std::string& line);

namespace reference {

/// Serial, unsegmented, filter-free version of search_fixed_n: every prime
/// p <= p_max, m built by Horner's rule and handed straight to is_prime.
std::vector<std::uint64_t> search_fixed_n(std::uint64_t n, std::uint64_t p_max, const arith::WitnessPolicy& policy);

}  // namespace reference

}  // namespace projprime::search
