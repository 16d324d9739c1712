#include "projprime/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <json.hpp>
#include <filesystem>
#include <set>
#include <sstream>

#include "projprime/bunyakovsky.hpp"
#include "projprime/digest.hpp"
#include "projprime/errors.hpp"
#include "projprime/fitstats.hpp"
#include "projprime/heuristics.hpp"
#include "projprime/projective.hpp"
#include "projprime/search.hpp"
#include "projprime/version.hpp"

namespace projprime::cli {

namespace {

using json = nlohmann::json;

enum class Format { Human, Csv, Json };

struct Globals {
  std::string format = "human";
  std::string out_path;
  int workers = 0;
  std::string threshold = "2^64";
  unsigned rounds = 40;
  std::uint64_t seed = 0;
  bool quiet = false;
  std::string save_config;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::istream& in;
  Format format;
  std::string config_hex;
  arith::WitnessPolicy policy;
  int workers;
  bool quiet;

  void header() const {
    if (format != Format::Json) out << "# projprime " << kVersion << " config=" << config_hex << "\n";
  }
  void stamp(json& j) const {
    j["version"] = kVersion;
    j["config"] = config_hex;
  }
  void log(const std::string& msg) const {
    if (!quiet) err << "projprime: " << msg << "\n";
  }
};

std::string ld(long double v, int digits = 12) { return fmt::format("{:.{}g}", v, digits); }

std::string opt_u64(const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); }

std::string verdict_name(arith::Verdict v) {
  switch (v) {
    case arith::Verdict::Composite: return "composite";
    case arith::Verdict::ProbablePrime: return "probable prime";
    case arith::Verdict::ProvenPrimeSmall: return "prime";
  }
  return "?";
}

std::string power_name(std::uint64_t p, unsigned e) {
  return e == 1 ? std::to_string(p) : std::to_string(p) + "^" + std::to_string(e);
}

// ---------------------------------------------------------------- isprime

struct IsPrimeArgs {
  std::string m;
};

void cmd_isprime(const Context& cx, const IsPrimeArgs& a) {
  std::string text = a.m;
  if (text == "-") {
    text.assign(std::istreambuf_iterator<char>(cx.in), std::istreambuf_iterator<char>());
    std::string cleaned;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      if (!line.empty() && line[0] == '#') continue;
      cleaned += line;
    }
    cleaned.erase(std::remove_if(cleaned.begin(), cleaned.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
                  cleaned.end());
    text = cleaned;
  }
  const BigInt m = parse_bigint(text);
  const arith::Primality v = arith::is_prime(m, cx.policy);
  const std::size_t digits = decimal_digits(m);

  std::string kind = "none";
  if (v.witness_kind == arith::WitnessKind::Factor) kind = "factor";
  if (v.witness_kind == arith::WitnessKind::MillerRabinBase) kind = "base";
  std::string verdict = verdict_name(v.verdict);
  if (m < 2) verdict = "not prime";

  switch (cx.format) {
    case Format::Human: {
      std::string detail = fmt::format("{} digits", digits);
      if (v.verdict == arith::Verdict::ProbablePrime) detail += fmt::format(", {} rounds", v.rounds);
      if (v.witness_kind == arith::WitnessKind::Factor) detail += ", factor " + to_decimal(v.witness);
      if (v.witness_kind == arith::WitnessKind::MillerRabinBase) detail += ", witness base " + to_decimal(v.witness);
      cx.out << verdict << " (" << detail << ")\n";
      break;
    }
    case Format::Csv:
      cx.out << "digits,verdict,witness_kind,witness,rounds\n";
      cx.out << digits << "," << verdict << "," << kind << "," << (v.witness_kind == arith::WitnessKind::None ? "" : to_decimal(v.witness))
             << "," << v.rounds << "\n";
      break;
    case Format::Json: {
      json j;
      j["digits"] = digits;
      j["verdict"] = verdict;
      j["witness_kind"] = kind;
      if (v.witness_kind != arith::WitnessKind::None) j["witness"] = to_decimal(v.witness);
      j["rounds"] = v.rounds;
      cx.out << j.dump() << "\n";
      break;
    }
  }
}

// ---------------------------------------------------------------- repunit

struct RepunitArgs {
  std::string q;
  std::string n;
};

void cmd_repunit(const Context& cx, const RepunitArgs& a) {
  const BigInt q = parse_bigint(a.q);
  const std::uint64_t n = parse_u64(a.n);
  const BigInt m = projective::repunit(q, n);
  if (cx.format == Format::Json) {
    json j;
    j["q"] = to_decimal(q);
    j["n"] = n;
    j["m"] = to_decimal(m);
    j["digits"] = decimal_digits(m);
    cx.out << j.dump() << "\n";
  } else {
    cx.out << to_decimal(m) << "\n";
  }
}

// ------------------------------------------------------- search drivers

struct RunArgs {
  std::string checkpoint;
  std::string hits;
  bool emit_m = false;
  bool list_hits = false;
  std::uint64_t stop_after = 0;
  std::string records;
  std::string trial_bound = "0";
};

search::RunControl control_of(const Context& cx, const RunArgs& r) {
  search::RunControl c;
  c.workers = cx.workers;
  if (!r.checkpoint.empty()) c.checkpoint = r.checkpoint;
  if (!r.hits.empty()) c.hit_stream = r.hits;
  c.emit_m = r.emit_m;
  if (r.stop_after > 0) c.stop_after_segments = r.stop_after;
  return c;
}

void write_records(const std::string& path, const search::SearchSummary& s) {
  if (path.empty()) return;
  std::ofstream f(path);
  f << "segment_index,lo,hi,primes_seen,projective_hits,max_hit_p\n";
  for (const auto& r : s.segments) f << search::format_record(r) << "\n";
  if (!f) throw IntegrityError("cannot write records to " + path);
}

json hits_json(const std::vector<search::Hit>& hits) {
  json arr = json::array();
  for (const auto& h : hits) {
    json j = {{"p", h.p}, {"e", h.e}, {"n", h.n}, {"digits", h.digits}};
    if (!h.m.empty()) j["m"] = h.m;
    arr.push_back(j);
  }
  return arr;
}

void list_hits(const Context& cx, const search::SearchSummary& s) {
  cx.out << "p,e,n,digits" << (s.hits.empty() || s.hits.front().m.empty() ? "" : ",m") << "\n";
  for (const auto& h : s.hits) cx.out << search::format_hit(h) << "\n";
}

struct FixedNArgs {
  std::string n;
  std::string p_max;
  std::string segment_size = "1000000";
  RunArgs run;
};

void cmd_search_fixed_n(const Context& cx, const FixedNArgs& a) {
  const std::uint64_t n = parse_u64(a.n);
  const std::uint64_t p_max = parse_u64(a.p_max);
  const auto t0 = std::chrono::steady_clock::now();
  const search::SearchSummary s = search::search_fixed_n(n, p_max, parse_u64(a.segment_size), cx.policy,
                                                         parse_u64(a.run.trial_bound), control_of(cx, a.run));
  cx.log(fmt::format("search-fixed-n n={} segments={}/{} in {:.1f}s", n, s.segments.size(), s.planned_segments,
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()));
  write_records(a.run.records, s);

  switch (cx.format) {
    case Format::Human:
      cx.header();
      cx.out << "n | N | max p\n";
      cx.out << n << " | " << s.total_hits << " | " << opt_u64(s.max_hit_p) << "\n";
      cx.out << "hits=" << s.total_hits << " max_p=" << opt_u64(s.max_hit_p) << " primes=" << s.total_primes
             << (s.complete() ? "" : " complete=false") << "\n";
      if (a.run.list_hits) list_hits(cx, s);
      break;
    case Format::Csv:
      cx.header();
      cx.out << "n,p_max,primes,hits,max_p,complete\n";
      cx.out << n << "," << p_max << "," << s.total_primes << "," << s.total_hits << "," << opt_u64(s.max_hit_p) << ","
             << (s.complete() ? 1 : 0) << "\n";
      if (a.run.list_hits) list_hits(cx, s);
      break;
    case Format::Json: {
      json j;
      cx.stamp(j);
      j["n"] = n;
      j["p_max"] = p_max;
      j["primes"] = s.total_primes;
      j["hits"] = s.total_hits;
      j["max_p"] = s.max_hit_p ? json(*s.max_hit_p) : json(nullptr);
      j["complete"] = s.complete();
      if (a.run.list_hits) j["hit_list"] = hits_json(s.hits);
      cx.out << j.dump() << "\n";
      break;
    }
  }
}

struct FixedPArgs {
  std::string p;
  std::string n_max;
  std::string trial_bound = "0";
};

void cmd_search_fixed_p(const Context& cx, const FixedPArgs& a) {
  const std::uint64_t p = parse_u64(a.p);
  const std::uint64_t n_max = parse_u64(a.n_max);
  const auto t0 = std::chrono::steady_clock::now();
  const search::FixedPResult r = search::search_fixed_p(p, n_max, cx.policy, parse_u64(a.trial_bound), cx.workers);
  cx.log(fmt::format("search-fixed-p p={} in {:.1f}s", p,
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()));
  std::optional<long double> estimate;
  if (static_cast<long double>(n_max) >= static_cast<long double>(p - 1) && n_max > 0) {
    estimate = heuristics::expected_count_fixed_p(p, static_cast<long double>(n_max)).value;
  }
  std::string list;
  for (std::uint64_t n : r.exponents) list += (list.empty() ? "" : " ") + std::to_string(n);
  std::string skipped;
  for (std::uint64_t n : r.skipped) skipped += (skipped.empty() ? "" : " ") + std::to_string(n);

  switch (cx.format) {
    case Format::Human:
      cx.header();
      cx.out << "p | estimation | true number | exponents n\n";
      cx.out << p << " | " << (estimate ? fmt::format("{:.3f}", *estimate) : "") << " | " << r.exponents.size() << " | "
             << list << "\n";
      if (!skipped.empty()) cx.out << "# skipped (n | p-1): " << skipped << "\n";
      break;
    case Format::Csv:
      cx.header();
      cx.out << "p,n_max,estimate,count,exponents,skipped\n";
      cx.out << p << "," << n_max << "," << (estimate ? ld(*estimate) : "") << "," << r.exponents.size() << "," << list
             << "," << skipped << "\n";
      break;
    case Format::Json: {
      json j;
      cx.stamp(j);
      j["p"] = p;
      j["n_max"] = n_max;
      j["estimate"] = estimate ? json(static_cast<double>(*estimate)) : json(nullptr);
      j["exponents"] = r.exponents;
      j["skipped"] = r.skipped;
      cx.out << j.dump() << "\n";
      break;
    }
  }
}

struct PrimePowerArgs {
  std::string q_max;
  unsigned e_min = 3;
  unsigned e_max = 0;
  std::string p;
  bool include_n2 = false;
  bool emit_m = false;
  std::string trial_bound = "0";
};

void cmd_search_prime_powers(const Context& cx, const PrimePowerArgs& a) {
  search::PrimePowerQuery q;
  q.q_max = parse_bigint(a.q_max);
  q.e_min = a.e_min;
  if (a.e_max) q.e_max = a.e_max;
  if (!a.p.empty()) q.only_p = parse_u64(a.p);
  q.include_n2 = a.include_n2;
  const auto t0 = std::chrono::steady_clock::now();
  const auto hits = search::search_prime_powers(q, cx.policy, parse_u64(a.trial_bound), cx.workers);
  cx.log(fmt::format("search-prime-powers in {:.1f}s",
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()));

  std::optional<std::uint64_t> max_p;
  for (const auto& h : hits) max_p = std::max(max_p.value_or(0), h.base.p);

  switch (cx.format) {
    case Format::Human:
      cx.header();
      cx.out << "q | n | digits" << (a.emit_m ? " | m" : "") << "\n";
      for (const auto& h : hits) {
        cx.out << power_name(h.base.p, h.base.e) << " | " << h.n << " | " << decimal_digits(h.m);
        if (a.emit_m) cx.out << " | " << to_decimal(h.m);
        cx.out << "\n";
      }
      cx.out << "solutions=" << hits.size() << " max_p=" << opt_u64(max_p) << "\n";
      break;
    case Format::Csv:
      cx.header();
      cx.out << "p,e,n,digits" << (a.emit_m ? ",m" : "") << "\n";
      for (const auto& h : hits) {
        cx.out << h.base.p << "," << h.base.e << "," << h.n << "," << decimal_digits(h.m);
        if (a.emit_m) cx.out << "," << to_decimal(h.m);
        cx.out << "\n";
      }
      break;
    case Format::Json: {
      json j;
      cx.stamp(j);
      json arr = json::array();
      for (const auto& h : hits) {
        json e = {{"p", h.base.p}, {"e", h.base.e}, {"n", h.n}, {"digits", decimal_digits(h.m)}};
        if (a.emit_m) e["m"] = to_decimal(h.m);
        arr.push_back(e);
      }
      j["solutions"] = arr;
      j["count"] = hits.size();
      cx.out << j.dump() << "\n";
      break;
    }
  }
}

struct GridArgs {
  std::string q_max;
  std::string n_max;
  RunArgs run;
};

void cmd_search_grid(const Context& cx, const GridArgs& a) {
  const std::uint64_t q_max = parse_u64(a.q_max), n_max = parse_u64(a.n_max);
  const auto t0 = std::chrono::steady_clock::now();
  const search::SearchSummary s =
      search::search_grid(q_max, n_max, cx.policy, parse_u64(a.run.trial_bound), control_of(cx, a.run));
  cx.log(fmt::format("search-grid segments={}/{} in {:.1f}s", s.segments.size(), s.planned_segments,
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()));
  write_records(a.run.records, s);
  std::uint64_t power_hits = 0;
  for (const auto& h : s.hits) power_hits += h.e >= 2;

  switch (cx.format) {
    case Format::Human:
      cx.header();
      cx.out << "hits=" << s.total_hits << " prime_power_hits=" << power_hits << " candidates=" << s.total_primes
             << (s.complete() ? "" : " complete=false") << (s.hits_truncated ? " hit_list=truncated" : "") << "\n";
      if (a.run.list_hits) list_hits(cx, s);
      break;
    case Format::Csv:
      cx.header();
      cx.out << "q_max,n_max,candidates,hits,prime_power_hits,complete\n";
      cx.out << q_max << "," << n_max << "," << s.total_primes << "," << s.total_hits << "," << power_hits << ","
             << (s.complete() ? 1 : 0) << "\n";
      if (a.run.list_hits) list_hits(cx, s);
      break;
    case Format::Json: {
      json j;
      cx.stamp(j);
      j["q_max"] = q_max;
      j["n_max"] = n_max;
      j["candidates"] = s.total_primes;
      j["hits"] = s.total_hits;
      j["prime_power_hits"] = power_hits;
      j["complete"] = s.complete();
      if (a.run.list_hits) j["hit_list"] = hits_json(s.hits);
      cx.out << j.dump() << "\n";
      break;
    }
  }
}

// ------------------------------------------------------------- collisions

struct CollisionArgs {
  std::string m_max;
  std::string domain = "prime-powers";
  std::uint64_t n_min = 3;
};

void cmd_collisions(const Context& cx, const CollisionArgs& a) {
  const search::CollisionDomain domain =
      a.domain == "all-integers" ? search::CollisionDomain::AllIntegers : search::CollisionDomain::PrimePowers;
  const auto entries = search::degree_collisions(parse_bigint(a.m_max), domain, a.n_min);
  auto reps = [](const search::CollisionEntry& e, const char* sep) {
    std::string s;
    for (const auto& r : e.representations) s += (s.empty() ? "" : sep) + fmt::format("({},{})", r.base.get_str(), r.n);
    return s;
  };
  switch (cx.format) {
    case Format::Human:
      cx.header();
      for (const auto& e : entries) {
        cx.out << e.m.get_str();
        for (const auto& r : e.representations) cx.out << " = R(" << r.base.get_str() << "," << r.n << ")";
        cx.out << "\n";
      }
      cx.out << "entries=" << entries.size() << "\n";
      break;
    case Format::Csv:
      cx.header();
      cx.out << "m,representations\n";
      for (const auto& e : entries) cx.out << e.m.get_str() << "," << reps(e, ";") << "\n";
      break;
    case Format::Json: {
      json j;
      cx.stamp(j);
      json arr = json::array();
      for (const auto& e : entries) {
        json r = json::array();
        for (const auto& x : e.representations) r.push_back({{"base", x.base.get_str()}, {"n", x.n}});
        arr.push_back({{"m", e.m.get_str()}, {"representations", r}});
      }
      j["entries"] = arr;
      cx.out << j.dump() << "\n";
      break;
    }
  }
}

// ------------------------------------------------------------ bunyakovsky

struct BunyakovskyArgs {
  std::string coeffs;
  std::string count_to;
  std::string domain = "naturals";
  std::uint64_t t_min = 1;
};

void cmd_bunyakovsky(const Context& cx, const BunyakovskyArgs& a) {
  using namespace bunyakovsky;
  const IntPolynomial f = IntPolynomial::parse(a.coeffs);
  const Report rep = bunyakovsky_report(f);
  std::string primes;
  for (const BigInt& p : prime_fixed_divisors(f)) primes += (primes.empty() ? "" : " ") + p.get_str();

  std::optional<CountResult> count;
  if (!a.count_to.empty()) {
    CountOptions opt;
    opt.t_min = a.t_min;
    opt.workers = cx.workers;
    const auto t0 = std::chrono::steady_clock::now();
    count = count_prime_values(f, parse_u64(a.count_to), parse_domain(a.domain), cx.policy, opt);
    cx.log(fmt::format("count_prime_values in {:.1f}s",
                       std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()));
  }

  switch (cx.format) {
    case Format::Human:
      cx.header();
      cx.out << "f(t) = " << f.to_string() << "\n";
      cx.out << "leading_positive=" << (rep.leading_positive ? "yes" : "no") << "\n";
      cx.out << "irreducible=" << tri_name(rep.irreducible);
      if (!rep.factorization.empty()) cx.out << " " << rep.factorization;
      cx.out << "\n";
      cx.out << "fixed_divisor=" << rep.fixed_divisor.get_str() << " primes=[" << primes << "]\n";
      cx.out << "satisfies=" << tri_name(rep.satisfies) << "\n";
      if (count) {
        cx.out << "prime_values=" << count->primes << " tested=" << count->tested << " domain=" << a.domain
               << " t=" << a.t_min << ".." << a.count_to << "\n";
      }
      break;
    case Format::Csv:
      cx.header();
      cx.out << "polynomial,leading_positive,irreducible,fixed_divisor,prime_divisors,satisfies,domain,t_min,t_max,"
                "tested,prime_values\n";
      cx.out << '"' << f.to_string() << "\"," << (rep.leading_positive ? "yes" : "no") << "," << tri_name(rep.irreducible)
             << "," << rep.fixed_divisor.get_str() << "," << primes << "," << tri_name(rep.satisfies);
      if (count) {
        cx.out << "," << a.domain << "," << a.t_min << "," << a.count_to << "," << count->tested << "," << count->primes;
      } else {
        cx.out << ",,,,,";
      }
      cx.out << "\n";
      break;
    case Format::Json: {
      json j;
      cx.stamp(j);
      j["polynomial"] = f.to_string();
      j["leading_positive"] = rep.leading_positive;
      j["irreducible"] = tri_name(rep.irreducible);
      if (!rep.factorization.empty()) j["factorization"] = rep.factorization;
      j["fixed_divisor"] = rep.fixed_divisor.get_str();
      j["prime_divisors"] = primes;
      j["satisfies"] = tri_name(rep.satisfies);
      if (count) {
        j["domain"] = a.domain;
        j["t_min"] = a.t_min;
        j["t_max"] = parse_u64(a.count_to);
        j["tested"] = count->tested;
        j["prime_values"] = count->primes;
      }
      cx.out << j.dump() << "\n";
      break;
    }
  }
}

// --------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string formula;
  std::string n;
  std::string p;
  std::string x;
  std::string y;
  std::string r_max;
  bool simplified = false;
};

long double parse_real(const std::string& s, const char* what) {
  if (s.empty()) throw DomainError(std::string("--") + what + " is required for this formula");
  try {
    const BigInt v = parse_bigint(s);
    return static_cast<long double>(v.get_d());
  } catch (const DomainError&) {
  }
  std::size_t used = 0;
  long double v = 0;
  try {
    v = std::stold(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw DomainError(std::string("bad value for --") + what + ": '" + s + "'");
  return v;
}

void cmd_estimate(const Context& cx, const EstimateArgs& a) {
  using namespace heuristics;
  std::vector<std::pair<std::string, std::string>> rows;  // key, value
  auto add = [&](const std::string& k, long double v) { rows.emplace_back(k, ld(v, 15)); };

  if (a.formula == "fixed-n") {
    const auto r = expected_count_fixed_n(parse_u64(a.n), parse_real(a.x, "x"));
    const mpq_class cn = c_n_exact(parse_u64(a.n));
    rows.emplace_back("c_n", cn.get_str());
    add("value", r.value);
  } else if (a.formula == "n3") {
    add("value", expected_count_n3(parse_real(a.x, "x")).value);
  } else if (a.formula == "fixed-p") {
    const auto r = expected_count_fixed_p(parse_u64(a.p), parse_real(a.x, "x"), a.simplified);
    add("value", r.value);
  } else if (a.formula == "fixed-p-probability") {
    add("value", prime_probability_fixed_p(parse_u64(a.p), parse_u64(a.n)).value);
  } else if (a.formula == "c-n") {
    rows.emplace_back("c_n", c_n_exact(parse_u64(a.n)).get_str());
    add("value", c_n(parse_u64(a.n)));
  } else if (a.formula == "mertens") {
    const std::uint64_t y = parse_u64(a.y.empty() ? a.x : a.y);
    if (y <= 10000) rows.emplace_back("exact", mertens_product_exact(y).get_str());
    add("value", mertens_product(y));
  } else if (a.formula == "polya") {
    const long double x = parse_real(a.x, "x");
    const PolyaProducts pp = polya_products(x);
    add("full", pp.full);
    add("sqrt", pp.sqrt);
    add("magic_mu", pp.magic_mu);
    add("reference", pp.reference);
    add("full_over_reference", pp.full / pp.reference);
    add("sqrt_over_reference", pp.sqrt / pp.reference);
    add("magic_mu_over_reference", pp.magic_mu / pp.reference);
  } else if (a.formula == "twin-constant") {
    add("value", twin_prime_constant(parse_u64(a.r_max)).value);
  } else {
    throw DomainError("unknown formula '" + a.formula + "'");
  }

  switch (cx.format) {
    case Format::Human:
      cx.header();
      cx.out << "formula=" << a.formula << "\n";
      for (const auto& [k, v] : rows) cx.out << k << "=" << v << "\n";
      break;
    case Format::Csv:
      cx.header();
      cx.out << "formula,key,value\n";
      for (const auto& [k, v] : rows) cx.out << a.formula << "," << k << "," << v << "\n";
      break;
    case Format::Json: {
      json j;
      cx.stamp(j);
      j["formula"] = a.formula;
      for (const auto& [k, v] : rows) j[k] = v;
      cx.out << j.dump() << "\n";
      break;
    }
  }
}

// -------------------------------------------------------------------- fit

std::ifstream open_input(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open input " + path);
  return f;
}

struct FitArgs {
  std::string input;
};

void cmd_fit(const Context& cx, const FitArgs& a) {
  std::ifstream f = open_input(a.input);
  const std::vector<fitstats::Point> pts = fitstats::read_points_csv(f);
  const fitstats::FitResult fit = fitstats::FitResult::from_points(pts);

  struct Row {
    long double x, y, n3, n3_ratio, est, est_ratio;
  };
  std::vector<Row> rows;
  for (const auto& p : pts) {
    const long double n3 = heuristics::expected_count_n3(p.x).value;
    const long double est = fitstats::rectified_estimate(p.x, fit);
    rows.push_back({p.x, p.y, n3, n3 / p.y, est, est / p.y});
  }

  switch (cx.format) {
    case Format::Human:
      cx.header();
      cx.out << fmt::format("a = {:.9f}, C = e^-a = {:.9f}, alpha = {:.9f}, rms = {:.3e}\n", fit.a, fit.C, fit.alpha,
                            fit.rms_residual);
      cx.out << "x | y | 15x/16ln(x)^2 | ratio | Cx/ln(x)^alpha | ratio\n";
      for (const Row& r : rows) {
        cx.out << fmt::format("{:.6g} | {:.0f} | {:.4e} | {:.4f} | {:.7e} | {:.6f}\n", r.x, r.y, r.n3, r.n3_ratio, r.est,
                              r.est_ratio);
      }
      break;
    case Format::Csv:
      cx.header();
      cx.out << "# a=" << ld(fit.a, 15) << " C=" << ld(fit.C, 15) << " alpha=" << ld(fit.alpha, 15)
             << " rms_residual=" << ld(fit.rms_residual, 6) << "\n";
      cx.out << "x,y,u,v,fitted_v,estimate_n3,ratio_n3,estimate_fit,ratio_fit\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        const auto& res = fit.residuals[i];
        cx.out << ld(r.x, 15) << "," << ld(r.y, 15) << "," << ld(res.u, 15) << "," << ld(res.v, 15) << ","
               << ld(res.fitted, 15) << "," << ld(r.n3, 15) << "," << ld(r.n3_ratio, 15) << "," << ld(r.est, 15) << ","
               << ld(r.est_ratio, 15) << "\n";
      }
      break;
    case Format::Json: {
      json j;
      cx.stamp(j);
      j["a"] = static_cast<double>(fit.a);
      j["C"] = static_cast<double>(fit.C);
      j["alpha"] = static_cast<double>(fit.alpha);
      j["rms_residual"] = static_cast<double>(fit.rms_residual);
      json res = json::array();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        res.push_back({{"x", static_cast<double>(rows[i].x)},
                       {"y", static_cast<double>(rows[i].y)},
                       {"u", static_cast<double>(fit.residuals[i].u)},
                       {"v", static_cast<double>(fit.residuals[i].v)},
                       {"fitted_v", static_cast<double>(fit.residuals[i].fitted)},
                       {"estimate", static_cast<double>(rows[i].est)},
                       {"ratio", static_cast<double>(rows[i].est_ratio)}});
      }
      j["points"] = res;
      cx.out << j.dump() << "\n";
      break;
    }
  }
}

// --------------------------------------------------------------- segments

struct SegmentsArgs {
  std::string input;
  std::string fit;
};

fitstats::FitResult load_fit(const std::string& spec) {
  if (const auto comma = spec.find(','); comma != std::string::npos && !std::filesystem::exists(spec)) {
    return fitstats::FitResult::from_constants(parse_real(spec.substr(0, comma), "fit"),
                                               parse_real(spec.substr(comma + 1), "fit"));
  }
  std::ifstream f = open_input(spec);
  json j;
  try {
    j = json::parse(f);
    return fitstats::FitResult::from_constants(j.at("C").get<double>(), j.at("alpha").get<double>());
  } catch (const json::exception& e) {
    throw DomainError("fit file " + spec + " is not a fit JSON document: " + e.what());
  }
}

void cmd_segments(const Context& cx, const SegmentsArgs& a) {
  std::ifstream f = open_input(a.input);
  const auto records = fitstats::read_records_csv(f);
  const fitstats::FitResult fit = load_fit(a.fit);
  const fitstats::RatioReport rep = fitstats::segment_ratios(records, fit);

  long double sum = 0, lo = 0, hi = 0;
  for (std::size_t i = 0; i < rep.ratios.size(); ++i) {
    const long double r = rep.ratios[i].ratio;
    sum += r;
    lo = i == 0 ? r : std::min(lo, r);
    hi = i == 0 ? r : std::max(hi, r);
  }
  const long double mean = rep.ratios.empty() ? 0 : sum / static_cast<long double>(rep.ratios.size());

  switch (cx.format) {
    case Format::Human:
    case Format::Csv:
      cx.header();
      cx.out << "# segments=" << rep.ratios.size() << " zero_hit_segments=" << rep.zero_hit_segments.size()
             << " mean_ratio=" << ld(mean, 8) << " r_min=" << ld(lo, 8) << " r_max=" << ld(hi, 8) << "\n";
      cx.out << "segment_index,hits,estimate,ratio\n";
      for (const auto& r : rep.ratios) {
        cx.out << r.segment_index << "," << r.hits << "," << ld(r.estimate, 12) << "," << ld(r.ratio, 12) << "\n";
      }
      break;
    case Format::Json: {
      json j;
      cx.stamp(j);
      json arr = json::array();
      for (const auto& r : rep.ratios) {
        arr.push_back({{"segment_index", r.segment_index},
                       {"hits", r.hits},
                       {"estimate", static_cast<double>(r.estimate)},
                       {"ratio", static_cast<double>(r.ratio)}});
      }
      j["ratios"] = arr;
      j["zero_hit_segments"] = rep.zero_hit_segments;
      j["mean_ratio"] = static_cast<double>(mean);
      cx.out << j.dump() << "\n";
      break;
    }
  }
}

// -------------------------------------------------------------- histogram

struct HistogramArgs {
  std::string input;
  std::size_t bins = 100;
};

void cmd_histogram(const Context& cx, const HistogramArgs& a) {
  std::ifstream f = open_input(a.input);
  const auto values = fitstats::read_values_csv(f);
  const fitstats::Histogram h = fitstats::build_histogram(values, a.bins);
  auto normal = [&](std::size_t i) {
    return h.stddev > 0 ? static_cast<long double>(h.total) *
                              fitstats::normal_density(static_cast<long double>(i) + 0.5L, h.mean, h.stddev)
                        : 0.0L;
  };

  switch (cx.format) {
    case Format::Human:
    case Format::Csv:
      cx.header();
      cx.out << "# total=" << h.total << " r_min=" << ld(h.r_min, 10) << " r_max=" << ld(h.r_max, 10)
             << " mean=" << ld(h.mean, 6) << " stddev=" << ld(h.stddev, 6) << " (bin units)\n";
      cx.out << "bin,lo,hi,count,normal\n";
      for (std::size_t i = 0; i < h.counts.size(); ++i) {
        cx.out << i << "," << ld(h.edges[i], 10) << "," << ld(h.edges[i + 1], 10) << "," << h.counts[i] << ","
               << ld(normal(i), 6) << "\n";
      }
      break;
    case Format::Json: {
      json j;
      cx.stamp(j);
      j["total"] = h.total;
      j["r_min"] = static_cast<double>(h.r_min);
      j["r_max"] = static_cast<double>(h.r_max);
      j["mean"] = static_cast<double>(h.mean);
      j["stddev"] = static_cast<double>(h.stddev);
      j["counts"] = h.counts;
      std::vector<double> edges(h.edges.begin(), h.edges.end());
      j["edges"] = edges;
      cx.out << j.dump() << "\n";
      break;
    }
  }
}

// ------------------------------------------------------------------ setup

std::string config_canonical(const CLI::App& app, const CLI::App& sub) {
  static const std::set<std::string> skip = {"--out",  "--workers", "--config",     "--checkpoint", "--hits",
                                             "--quiet", "--help",   "--save-config", "--stop-after", "--records"};
  std::string s = sub.get_name();
  auto add = [&](const CLI::App& a) {
    for (const CLI::Option* o : a.get_options()) {
      const std::string name = o->get_name();
      if (skip.count(name)) continue;
      std::string value;
      if (o->count() > 0) {
        for (const std::string& r : o->reduced_results()) value += (value.empty() ? "" : " ") + r;
      } else {
        value = o->get_default_str();
      }
      s += ";" + name + "=" + value;
    }
  };
  add(app);
  add(sub);
  return s;
}

void add_run_options(CLI::App* sub, RunArgs& r, bool checkpointable) {
  sub->add_option("--trial-bound", r.trial_bound, "largest admissible divisor tried before Miller-Rabin (0: default)")
      ->capture_default_str();
  if (!checkpointable) return;
  sub->add_option("--checkpoint", r.checkpoint, "checkpoint file; resumed when it exists");
  sub->add_option("--hits", r.hits, "hit stream file (default <checkpoint>.hits)");
  sub->add_flag("--emit-m", r.emit_m, "include m itself in hit lines");
  sub->add_flag("--list-hits", r.list_hits, "print the in-memory hit list: p,e,n,digits[,m]");
  sub->add_option("--records", r.records,
                  "write segment records: segment_index,lo,hi,primes_seen,projective_hits,max_hit_p");
  sub->add_option("--stop-after", r.stop_after, "stop after this many segments (resumable)");
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"projprime: search and heuristics for primes (q^n - 1)/(q - 1)", "projprime"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "read options from a TOML/INI file");

  Globals g;
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"human", "csv", "json"}))
      ->capture_default_str();
  app.add_option("--out", g.out_path, "write machine output here instead of stdout");
  app.add_option("--workers", g.workers, "worker threads (default: all processors)")->envname("PROJPRIME_WORKERS");
  app.add_option("--threshold", g.threshold, "deterministic Miller-Rabin threshold")->capture_default_str();
  app.add_option("--rounds", g.rounds, "Miller-Rabin rounds above the threshold")->capture_default_str();
  app.add_option("--seed", g.seed, "seed for the witness generator")->capture_default_str();
  app.add_flag("--quiet", g.quiet, "no progress on stderr");
  app.add_option("--save-config", g.save_config, "write the effective options to this file and continue")
      ->configurable(false);

  IsPrimeArgs isprime;
  auto* s_isprime = app.add_subcommand("isprime", "primality of m ('-' reads stdin)");
  s_isprime->add_option("m", isprime.m, "integer; accepts 1e6, 10^9, 2^61-style shorthands")->required();
  s_isprime->footer("csv columns: digits,verdict,witness_kind,witness,rounds");

  RepunitArgs repunit;
  auto* s_repunit = app.add_subcommand("repunit", "print (q^n - 1)/(q - 1)");
  s_repunit->add_option("q", repunit.q)->required();
  s_repunit->add_option("n", repunit.n)->required();

  FixedNArgs fixed_n;
  auto* s_fixed_n = app.add_subcommand("search-fixed-n", "primes p <= p-max with (p^n - 1)/(p - 1) prime");
  s_fixed_n->add_option("--n", fixed_n.n, "odd prime exponent")->required();
  s_fixed_n->add_option("--p-max", fixed_n.p_max)->required();
  s_fixed_n->add_option("--segment-size", fixed_n.segment_size)->capture_default_str();
  fixed_n.run.trial_bound = std::to_string(projective::kDefaultTrialBound);
  add_run_options(s_fixed_n, fixed_n.run, true);
  s_fixed_n->footer("csv columns: n,p_max,primes,hits,max_p,complete");

  FixedPArgs fixed_p;
  auto* s_fixed_p = app.add_subcommand("search-fixed-p", "odd prime exponents n <= n-max with (p^n - 1)/(p - 1) prime");
  s_fixed_p->add_option("--p", fixed_p.p)->required();
  s_fixed_p->add_option("--n-max", fixed_p.n_max)->required();
  s_fixed_p->add_option("--trial-bound", fixed_p.trial_bound, "0: max(10^5, 2n*10^4) per exponent")->capture_default_str();
  s_fixed_p->footer("csv columns: p,n_max,estimate,count,exponents,skipped");

  PrimePowerArgs powers;
  auto* s_powers = app.add_subcommand("search-prime-powers", "q = p^e <= q-max, e >= e-min, prime n <= e");
  s_powers->add_option("--q-max", powers.q_max)->required();
  s_powers->add_option("--e-min", powers.e_min)->capture_default_str();
  s_powers->add_option("--e-max", powers.e_max, "0: no upper limit");
  s_powers->add_option("--p", powers.p, "restrict to one prime p");
  s_powers->add_flag("--include-n2", powers.include_n2, "also test n = 2");
  s_powers->add_flag("--emit-m", powers.emit_m);
  s_powers->add_option("--trial-bound", powers.trial_bound)->capture_default_str();
  s_powers->footer("csv columns: p,e,n,digits[,m]");

  GridArgs grid;
  auto* s_grid = app.add_subcommand("search-grid", "all prime powers q <= q-max against odd primes n <= n-max");
  s_grid->add_option("--q-max", grid.q_max)->required();
  s_grid->add_option("--n-max", grid.n_max)->required();
  add_run_options(s_grid, grid.run, true);
  s_grid->footer("csv columns: q_max,n_max,candidates,hits,prime_power_hits,complete; hits: p,e,n,digits[,m]");

  CollisionArgs coll;
  auto* s_coll = app.add_subcommand("collisions", "values with two repunit representations");
  s_coll->add_option("--m-max", coll.m_max)->required();
  s_coll->add_option("--domain", coll.domain)
      ->check(CLI::IsMember({"prime-powers", "all-integers"}))
      ->capture_default_str();
  s_coll->add_option("--n-min", coll.n_min)->capture_default_str();
  s_coll->footer("csv columns: m,representations  (base,n pairs joined by ';')");

  BunyakovskyArgs buny;
  auto* s_buny = app.add_subcommand("bunyakovsky", "fixed divisors, conjecture hypotheses and prime values");
  s_buny->add_option("--coeffs", buny.coeffs, "c0,c1,...,cn (constant term first)")->required();
  s_buny->add_option("--count-to", buny.count_to, "count t <= this with f(t) prime");
  s_buny->add_option("--domain", buny.domain)
      ->check(CLI::IsMember({"naturals", "primes", "prime-powers"}))
      ->capture_default_str();
  s_buny->add_option("--t-min", buny.t_min)->capture_default_str();
  s_buny->footer(
      "csv columns: polynomial,leading_positive,irreducible,fixed_divisor,prime_divisors,satisfies,domain,t_min,t_max,"
      "tested,prime_values");

  EstimateArgs est;
  auto* s_est = app.add_subcommand("estimate", "heuristic formulas");
  s_est->add_option("--formula", est.formula)
      ->required()
      ->check(CLI::IsMember({"fixed-n", "fixed-p", "n3", "polya", "twin-constant", "fixed-p-probability", "c-n", "mertens"}));
  s_est->add_option("--n", est.n);
  s_est->add_option("--p", est.p);
  s_est->add_option("--x", est.x);
  s_est->add_option("--y", est.y, "bound for the Mertens product");
  s_est->add_option("--r-max", est.r_max);
  s_est->add_flag("--simplified", est.simplified, "fixed-p: drop the ln(p-1) term");
  s_est->footer("csv columns: formula,key,value");

  FitArgs fit;
  auto* s_fit = app.add_subcommand("fit", "least-squares fit of y = C x / ln(x)^alpha");
  s_fit->add_option("--input", fit.input, "CSV of x,y pairs")->required();
  s_fit->footer("csv columns: x,y,u,v,fitted_v,estimate_n3,ratio_n3,estimate_fit,ratio_fit");

  SegmentsArgs seg;
  auto* s_seg = app.add_subcommand("segments", "ratio of fitted estimate to hits per segment");
  s_seg->add_option("--input", seg.input, "segment records CSV or a checkpoint file")->required();
  s_seg->add_option("--fit", seg.fit, "fit JSON from 'fit --format json', or 'C,alpha'")->required();
  s_seg->footer("csv columns: segment_index,hits,estimate,ratio");

  HistogramArgs hist;
  auto* s_hist = app.add_subcommand("histogram", "equal-width histogram of values (last CSV column)");
  s_hist->add_option("--input", hist.input)->required();
  s_hist->add_option("--bins", hist.bins)->capture_default_str();
  s_hist->footer("csv columns: bin,lo,hi,count,normal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (!g.save_config.empty()) {
      std::ofstream cf(g.save_config);
      cf << app.config_to_str(false, false);
      if (!cf) throw IntegrityError("cannot write config " + g.save_config);
    }

    arith::WitnessPolicy policy;
    policy.deterministic_threshold = parse_bigint(g.threshold);
    policy.rounds_above_threshold = g.rounds;
    policy.rng_seed = g.seed;
    policy.validate();

    const CLI::App* sub = app.get_subcommands().front();
    std::ofstream file;
    if (!g.out_path.empty()) {
      file.open(g.out_path);
      if (!file) throw DomainError("cannot open output " + g.out_path);
    }
    Format format = Format::Human;
    if (g.format == "csv") format = Format::Csv;
    if (g.format == "json") format = Format::Json;

    Context cx{g.out_path.empty() ? out : file, err, in, format, hex64(fnv1a64(config_canonical(app, *sub))), policy,
               search::resolve_workers(g.workers), g.quiet};

    const std::string name = sub->get_name();
    if (name == "isprime") cmd_isprime(cx, isprime);
    else if (name == "repunit") cmd_repunit(cx, repunit);
    else if (name == "search-fixed-n") cmd_search_fixed_n(cx, fixed_n);
    else if (name == "search-fixed-p") cmd_search_fixed_p(cx, fixed_p);
    else if (name == "search-prime-powers") cmd_search_prime_powers(cx, powers);
    else if (name == "search-grid") cmd_search_grid(cx, grid);
    else if (name == "collisions") cmd_collisions(cx, coll);
    else if (name == "bunyakovsky") cmd_bunyakovsky(cx, buny);
    else if (name == "estimate") cmd_estimate(cx, est);
    else if (name == "fit") cmd_fit(cx, fit);
    else if (name == "segments") cmd_segments(cx, seg);
    else if (name == "histogram") cmd_histogram(cx, hist);
    cx.out.flush();
    return kOk;
  } catch (const DomainError& e) {
    err << "projprime: error: " << e.what() << "\n";
    return kDomain;
  } catch (const IntegrityError& e) {
    err << "projprime: integrity error: " << e.what() << "\n";
    return kIntegrity;
  } catch (const std::exception& e) {
    err << "projprime: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace projprime::cli
