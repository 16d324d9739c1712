#include "projprime/search.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <unordered_map>

#include "projprime/digest.hpp"
#include "projprime/errors.hpp"
#include "projprime/parallel.hpp"
#include "projprime/sieve.hpp"

namespace projprime::search {

using projective::AdmissibleDivisors;
using projective::PrimePower;
using projective::ProjectiveCandidate;

std::string mode_name(Mode mode) { return mode == Mode::FixedN ? "fixed-n" : "grid"; }

Mode parse_mode(const std::string& name) {
  if (name == "fixed-n") return Mode::FixedN;
  if (name == "grid") return Mode::Grid;
  throw IntegrityError("unknown search mode '" + name + "'");
}

std::uint64_t SearchParams::digest() const {
  return fnv1a64(mode_name(mode) + "|" + canonical + "|" + hex64(policy_digest));
}

void SearchSummary::recompute_totals() {
  total_primes = 0;
  total_hits = 0;
  max_hit_p.reset();
  for (const SegmentRecord& r : segments) {
    total_primes += r.primes_seen;
    total_hits += r.projective_hits;
    if (r.max_hit_p && (!max_hit_p || *r.max_hit_p > *max_hit_p)) max_hit_p = r.max_hit_p;
  }
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PROJPRIME_WORKERS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end == '\0' && v > 0 && v <= 4096) return static_cast<int>(v);
    throw DomainError(std::string("PROJPRIME_WORKERS must be a positive integer, got '") + env + "'");
  }
  return std::max(1, omp_get_num_procs());
}

std::uint64_t adaptive_trial_bound(std::uint64_t n) {
  return std::max<std::uint64_t>(projective::kDefaultTrialBound, 2 * n * 10000);
}

namespace {

struct SegmentOutcome {
  SegmentRecord record;
  std::vector<Hit> hits;
};

Hit make_hit(const ProjectiveCandidate& c, bool emit_m) {
  Hit h;
  h.p = c.base.p;
  h.e = c.base.e;
  h.n = c.n;
  h.digits = decimal_digits(c.m);
  if (emit_m) h.m = to_decimal(c.m);
  return h;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

class HitSink {
 public:
  HitSink(const std::optional<std::filesystem::path>& path, std::size_t keep_lines, SearchSummary& summary,
          std::size_t cap)
      : summary_(summary), cap_(cap) {
    if (!path) {
      summary_.hits_truncated = keep_lines > 0;
      return;
    }
    std::vector<std::string> kept;
    if (keep_lines > 0) {
      std::vector<std::string> lines = read_lines(*path);
      if (lines.size() < keep_lines) {
        throw IntegrityError("hit stream " + path->string() + " has " + std::to_string(lines.size()) +
                             " lines, checkpoint records " + std::to_string(keep_lines) + " hits");
      }
      lines.resize(keep_lines);
      kept = std::move(lines);
    }
    out_.open(*path, std::ios::trunc);
    if (!out_) throw IntegrityError("cannot open hit stream " + path->string());
    for (const std::string& line : kept) {
      out_ << line << '\n';
      remember(parse_hit(line));
    }
    out_.flush();
  }

  void append(const std::vector<Hit>& hits) {
    for (const Hit& h : hits) {
      if (out_.is_open()) out_ << format_hit(h) << '\n';
      remember(h);
    }
  }

  void flush() {
    if (!out_.is_open()) return;
    out_.flush();
    if (!out_) throw IntegrityError("write to hit stream failed");
  }

 private:
  void remember(const Hit& h) {
    if (summary_.hits.size() < cap_) {
      summary_.hits.push_back(h);
    } else {
      summary_.hits_truncated = true;
    }
  }

  SearchSummary& summary_;
  std::size_t cap_;
  std::ofstream out_;
};

/// Shared segment loop: resume, batch, fold in order, checkpoint.
/// With `parallel_segments` false the segments run one at a time on the
/// calling thread and `run` is free to parallelise internally.
template <typename RunSegment>
SearchSummary drive(const SearchParams& params, std::uint64_t planned, const RunControl& control,
                    bool parallel_segments, RunSegment&& run) {
  SearchSummary summary;
  summary.params = params;
  summary.planned_segments = planned;

  std::optional<std::filesystem::path> hit_path = control.hit_stream;
  if (!hit_path && control.checkpoint) hit_path = control.checkpoint->string() + ".hits";

  std::size_t resumed_hits = 0;
  if (control.checkpoint && std::filesystem::exists(*control.checkpoint)) {
    SearchSummary prev = checkpoint_resume(*control.checkpoint, params);
    if (prev.planned_segments != planned) throw IntegrityError("checkpoint plans a different segment count");
    summary.segments = std::move(prev.segments);
    summary.recompute_totals();
    resumed_hits = summary.total_hits;
  }
  HitSink sink(hit_path, resumed_hits, summary, control.hit_cap);

  const int workers = parallel_segments ? resolve_workers(control.workers) : 1;
  const std::uint64_t batch = static_cast<std::uint64_t>(workers);
  std::uint64_t next = summary.segments.size();
  std::uint64_t limit = planned;
  if (control.stop_after_segments) limit = std::min(planned, next + *control.stop_after_segments);

  while (next < limit) {
    const std::uint64_t count = std::min(batch, limit - next);
    std::vector<SegmentOutcome> outcomes(count);
    if (parallel_segments) {
      parallel_for(count, workers, [&](std::size_t i) { outcomes[i] = run(next + i); });
    } else {
      for (std::uint64_t i = 0; i < count; ++i) outcomes[i] = run(next + i);
    }
    for (SegmentOutcome& o : outcomes) {
      summary.segments.push_back(o.record);
      sink.append(o.hits);
    }
    next += count;
    summary.recompute_totals();
    sink.flush();
    if (control.checkpoint) checkpoint_write(summary, *control.checkpoint);
  }
  summary.recompute_totals();
  return summary;
}

std::string canonical_join(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string s;
  for (const auto& [k, v] : kv) {
    if (!s.empty()) s += ';';
    s += k + "=" + v;
  }
  return s;
}

}  // namespace

SearchSummary search_fixed_n(std::uint64_t n, std::uint64_t p_max, std::uint64_t segment_size,
                             const arith::WitnessPolicy& policy, std::uint64_t trial_bound,
                             const RunControl& control) {
  if (n < 3 || !arith::is_prime_u64(n)) throw DomainError("search_fixed_n: n must be an odd prime, got " + std::to_string(n));
  if (segment_size == 0) throw DomainError("segment size must be >= 1");
  if (p_max >= (std::uint64_t{1} << 62)) throw DomainError("p_max too large");
  policy.validate();
  if (trial_bound == 0) trial_bound = projective::kDefaultTrialBound;

  SearchParams params;
  params.mode = Mode::FixedN;
  params.canonical = canonical_join({{"n", std::to_string(n)},
                                     {"p-max", std::to_string(p_max)},
                                     {"segment-size", std::to_string(segment_size)},
                                     {"trial-bound", std::to_string(trial_bound)}});
  params.policy_digest = policy.digest();

  const std::uint64_t end = p_max + 1;
  const std::uint64_t planned = (end + segment_size - 1) / segment_size;
  const AdmissibleDivisors divisors(n, trial_bound);

  return drive(params, planned, control, true, [&](std::uint64_t idx) {
    SegmentOutcome out;
    SegmentRecord& rec = out.record;
    rec.segment_index = idx;
    rec.lo = idx * segment_size;
    rec.hi = std::min(end, rec.lo + segment_size);
    arith::for_each_prime(rec.lo, rec.hi, [&](std::uint64_t p) {
      ++rec.primes_seen;
      PrimePower base;
      base.p = p;
      base.e = 1;
      base.q = from_u64(p);
      const ProjectiveCandidate c = ProjectiveCandidate::make(base, n);
      if (projective::is_projective_prime(c, policy, trial_bound, &divisors).is_prime()) {
        ++rec.projective_hits;
        rec.max_hit_p = p;
        out.hits.push_back(make_hit(c, control.emit_m));
      }
    });
    return out;
  });
}

FixedPResult search_fixed_p(std::uint64_t p, std::uint64_t n_max, const arith::WitnessPolicy& policy,
                            std::uint64_t trial_bound, int workers) {
  const PrimePower base = PrimePower::make(p, 1);
  policy.validate();
  FixedPResult result;
  result.p = p;
  result.n_max = n_max;

  std::vector<std::uint64_t> todo;
  for (std::uint64_t n : grid_exponents(n_max)) {
    if ((p - 1) % n == 0) {
      // q = 1 (mod n) makes m = n (mod n) and m > n: n | m.
      std::uint64_t m_mod = 0;
      for (std::uint64_t i = 0, pw = 1 % n; i < n; ++i, pw = arith::mul_mod_u64(pw, p % n, n)) m_mod = (m_mod + pw) % n;
      if (m_mod != 0) throw std::logic_error("excluded exponent does not divide m");
      result.skipped.push_back(n);
    } else {
      todo.push_back(n);
    }
  }

  std::vector<char> prime(todo.size(), 0);
  // Largest exponents first: they dominate the cost, so dynamic scheduling
  // balances better when they start early.
  parallel_for(todo.size(), resolve_workers(workers), [&](std::size_t k) {
    const std::size_t i = todo.size() - 1 - k;
    const std::uint64_t n = todo[i];
    const std::uint64_t bound = trial_bound ? trial_bound : adaptive_trial_bound(n);
    const AdmissibleDivisors divisors(n, bound);
    const ProjectiveCandidate c = ProjectiveCandidate::make(base, n);
    prime[i] = projective::is_projective_prime(c, policy, bound, &divisors).is_prime();
  });
  for (std::size_t i = 0; i < todo.size(); ++i) {
    if (prime[i]) result.exponents.push_back(todo[i]);
  }
  return result;
}

std::vector<PrimePowerHit> search_prime_powers(const PrimePowerQuery& query, const arith::WitnessPolicy& policy,
                                               std::uint64_t trial_bound, int workers) {
  if (query.e_min < 2) throw DomainError("search_prime_powers: e_min must be >= 2");
  if (query.e_max && *query.e_max < query.e_min) throw DomainError("search_prime_powers: e_max < e_min");
  policy.validate();

  std::vector<std::uint64_t> bases;
  if (query.only_p) {
    (void)PrimePower::make(*query.only_p, 1);
    bases.push_back(*query.only_p);
  } else {
    BigInt root;
    mpz_root(root.get_mpz_t(), query.q_max.get_mpz_t(), query.e_min);
    if (root > BigInt(1) << 36) throw DomainError("search_prime_powers: q_max^(1/e_min) exceeds 2^36");
    bases = arith::primes_up_to(to_u64(root));
  }

  std::vector<ProjectiveCandidate> candidates;
  for (std::uint64_t p : bases) {
    for (unsigned e = query.e_min;; ++e) {
      if (query.e_max && e > *query.e_max) break;
      const PrimePower pp = PrimePower::make(p, e);
      if (pp.q > query.q_max) break;
      if (query.include_n2) candidates.push_back(ProjectiveCandidate::make(pp, 2));
      for (std::uint64_t n = 3; n <= e; n += 2) {
        if (arith::is_prime_u64(n)) candidates.push_back(ProjectiveCandidate::make(pp, n));
      }
    }
  }

  std::vector<char> prime(candidates.size(), 0);
  parallel_for(candidates.size(), resolve_workers(workers), [&](std::size_t i) {
    const ProjectiveCandidate& c = candidates[i];
    const std::uint64_t bound = trial_bound ? trial_bound : adaptive_trial_bound(c.n);
    prime[i] = projective::is_projective_prime(c, policy, bound).is_prime();
  });

  std::vector<PrimePowerHit> hits;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (prime[i]) hits.push_back({candidates[i].base, candidates[i].n, candidates[i].m});
  }
  return hits;
}

std::vector<std::uint64_t> grid_exponents(std::uint64_t n_max) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p : arith::primes_up_to(n_max)) {
    if (p >= 3) out.push_back(p);
  }
  return out;
}

SearchSummary search_grid(std::uint64_t q_max, std::uint64_t n_max, const arith::WitnessPolicy& policy,
                          std::uint64_t trial_bound, const RunControl& control) {
  if (q_max < 2 || n_max < 3) throw DomainError("search_grid: need q_max >= 2 and n_max >= 3");
  if (q_max > (std::uint64_t{1} << 32)) throw DomainError("search_grid: q_max too large");
  policy.validate();

  SearchParams params;
  params.mode = Mode::Grid;
  params.canonical = canonical_join({{"q-max", std::to_string(q_max)},
                                     {"n-max", std::to_string(n_max)},
                                     {"trial-bound", std::to_string(trial_bound)}});
  params.policy_digest = policy.digest();

  std::vector<PrimePower> powers;
  for (std::uint64_t p : arith::primes_up_to(q_max)) {
    std::uint64_t q = p;
    for (unsigned e = 1;; ++e) {
      PrimePower pp;
      pp.p = p;
      pp.e = e;
      pp.q = from_u64(q);
      powers.push_back(pp);
      if (q > q_max / p) break;
      q *= p;
    }
  }
  std::sort(powers.begin(), powers.end(), [](const PrimePower& a, const PrimePower& b) { return a.q < b.q; });

  const std::vector<std::uint64_t> exponents = grid_exponents(n_max);
  const int workers = resolve_workers(control.workers);

  return drive(params, exponents.size(), control, false, [&](std::uint64_t idx) {
    const std::uint64_t n = exponents[idx];
    const std::uint64_t bound = trial_bound ? trial_bound : adaptive_trial_bound(n);
    const AdmissibleDivisors divisors(n, bound);
    std::vector<char> prime(powers.size(), 0);
    std::vector<ProjectiveCandidate> cands(powers.size());
    parallel_for(powers.size(), workers, [&](std::size_t i) {
      cands[i] = ProjectiveCandidate::make(powers[i], n);
      prime[i] = projective::is_projective_prime(cands[i], policy, bound, &divisors).is_prime();
    });

    SegmentOutcome out;
    SegmentRecord& rec = out.record;
    rec.segment_index = idx;
    rec.lo = 2;
    rec.hi = q_max + 1;
    rec.primes_seen = powers.size();
    for (std::size_t i = 0; i < powers.size(); ++i) {
      if (!prime[i]) continue;
      ++rec.projective_hits;
      if (!rec.max_hit_p || powers[i].p > *rec.max_hit_p) rec.max_hit_p = powers[i].p;
      out.hits.push_back(make_hit(cands[i], control.emit_m));
    }
    return out;
  });
}

bool is_prime_power(std::uint64_t v) {
  if (v < 2) return false;
  const std::uint64_t p = arith::smallest_factor_u64(v);
  while (v % p == 0) v /= p;
  return v == 1;
}

std::vector<CollisionEntry> degree_collisions(const BigInt& m_max, CollisionDomain domain, std::uint64_t n_min) {
  if (n_min < 2) throw DomainError("degree_collisions: n_min must be >= 2");
  std::vector<CollisionEntry> entries;
  if (m_max < 3) return entries;

  BigInt root;
  mpz_root(root.get_mpz_t(), m_max.get_mpz_t(), n_min - 1);
  if (root > BigInt(1) << 32) throw DomainError("degree_collisions: too many bases for this m_max and n_min");
  const std::uint64_t max_base = to_u64(root);

  std::vector<char> allowed;
  if (domain == CollisionDomain::PrimePowers) {
    allowed.assign(max_base + 1, 0);
    for (std::uint64_t p : arith::primes_up_to(max_base)) {
      for (std::uint64_t q = p;; q *= p) {
        allowed[q] = 1;
        if (q > max_base / p) break;
      }
    }
  }

  std::unordered_multimap<Digest128, std::size_t, Digest128Hash> index;
  auto insert = [&](const BigInt& v, const BigInt& base, std::uint64_t n) {
    const Digest128 key = fnv1a128(canonical_bytes(v));
    auto [lo, hi] = index.equal_range(key);
    for (auto it = lo; it != hi; ++it) {
      if (entries[it->second].m == v) {
        entries[it->second].representations.push_back({base, n});
        return;
      }
    }
    index.emplace(key, entries.size());
    entries.push_back({v, {{base, n}}});
  };

  for (std::uint64_t n = n_min;; ++n) {
    if (projective::repunit(2, n) > m_max) break;
    for (std::uint64_t b = 2; b <= max_base; ++b) {
      const BigInt base = from_u64(b);
      const BigInt v = projective::repunit(base, n);
      if (v > m_max) break;
      if (domain == CollisionDomain::PrimePowers && !allowed[b]) continue;
      insert(v, base, n);
    }
  }

  std::vector<CollisionEntry> out;
  for (CollisionEntry& e : entries) {
    if (e.representations.size() < 2) continue;
    std::sort(e.representations.begin(), e.representations.end(),
              [](const Representation& a, const Representation& b) { return a.n > b.n; });
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const CollisionEntry& a, const CollisionEntry& b) { return a.m < b.m; });
  return out;
}

}  // namespace projprime::search
