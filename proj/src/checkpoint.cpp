#include <fstream>
#include <sstream>

#include "projprime/digest.hpp"
#include "projprime/errors.hpp"
#include "projprime/search.hpp"

namespace projprime::search {

namespace {

constexpr const char* kMagic = "projprime-checkpoint";
constexpr int kFormatVersion = 1;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::uint64_t field_u64(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw IntegrityError(std::string("bad ") + what + " field '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw IntegrityError(std::string("bad ") + what + " field '" + s + "'");
  }
}

std::string header_line(const SearchSummary& s) {
  return std::string(kMagic) + "," + std::to_string(kFormatVersion) + "," + mode_name(s.params.mode) + "," +
         s.params.canonical + "," + hex64(s.params.policy_digest) + "," + std::to_string(s.planned_segments);
}

}  // namespace

std::string format_record(const SegmentRecord& r) {
  std::string s = std::to_string(r.segment_index) + "," + std::to_string(r.lo) + "," + std::to_string(r.hi) + "," +
                  std::to_string(r.primes_seen) + "," + std::to_string(r.projective_hits) + ",";
  if (r.max_hit_p) s += std::to_string(*r.max_hit_p);
  return s;
}

SegmentRecord parse_record(const std::string& line) {
  const std::vector<std::string> f = split(line, ',');
  if (f.size() != 6) throw IntegrityError("segment record needs 6 fields: '" + line + "'");
  SegmentRecord r;
  r.segment_index = field_u64(f[0], "segment_index");
  r.lo = field_u64(f[1], "lo");
  r.hi = field_u64(f[2], "hi");
  r.primes_seen = field_u64(f[3], "primes_seen");
  r.projective_hits = field_u64(f[4], "projective_hits");
  if (!f[5].empty()) r.max_hit_p = field_u64(f[5], "max_hit_p");
  if (r.hi < r.lo || r.projective_hits > r.primes_seen) throw IntegrityError("inconsistent segment record '" + line + "'");
  if (r.max_hit_p && (*r.max_hit_p < r.lo || *r.max_hit_p >= r.hi)) {
    throw IntegrityError("max_hit_p outside segment in '" + line + "'");
  }
  if (r.max_hit_p.has_value() != (r.projective_hits > 0)) throw IntegrityError("max_hit_p disagrees with hit count in '" + line + "'");
  return r;
}

std::string format_hit(const Hit& h) {
  std::string s = std::to_string(h.p) + "," + std::to_string(h.e) + "," + std::to_string(h.n) + "," +
                  std::to_string(h.digits);
  if (!h.m.empty()) s += "," + h.m;
  return s;
}

Hit parse_hit(const std::string& line) {
  const std::vector<std::string> f = split(line, ',');
  if (f.size() != 4 && f.size() != 5) throw IntegrityError("hit line needs 4 or 5 fields: '" + line + "'");
  Hit h;
  h.p = field_u64(f[0], "p");
  h.e = static_cast<unsigned>(field_u64(f[1], "e"));
  h.n = field_u64(f[2], "n");
  h.digits = field_u64(f[3], "digits");
  if (f.size() == 5) h.m = f[4];
  return h;
}

void checkpoint_write(const SearchSummary& summary, const std::filesystem::path& path) {
  std::string body = header_line(summary) + "\n";
  for (const SegmentRecord& r : summary.segments) body += format_record(r) + "\n";
  body += "checksum," + hex64(fnv1a64(body)) + "\n";

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << body;
    out.flush();
    if (!out) throw IntegrityError("cannot write checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

SearchSummary checkpoint_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  if (text.empty() || text.back() != '\n') throw IntegrityError("checkpoint truncated: " + path.string());
  const std::size_t footer_at = text.rfind('\n', text.size() - 2);
  const std::size_t body_len = footer_at == std::string::npos ? 0 : footer_at + 1;
  const std::string footer = text.substr(body_len, text.size() - body_len - 1);
  const std::string body = text.substr(0, body_len);
  if (footer.rfind("checksum,", 0) != 0) throw IntegrityError("checkpoint has no checksum footer: " + path.string());
  if (footer.substr(9) != hex64(fnv1a64(body))) throw IntegrityError("checkpoint checksum mismatch: " + path.string());

  std::istringstream lines(body);
  std::string line;
  if (!std::getline(lines, line)) throw IntegrityError("checkpoint has no header");
  const std::vector<std::string> h = split(line, ',');
  if (h.size() != 6 || h[0] != kMagic) throw IntegrityError("bad checkpoint header '" + line + "'");
  if (h[1] != std::to_string(kFormatVersion)) throw IntegrityError("unsupported checkpoint version " + h[1]);

  SearchSummary s;
  s.params.mode = parse_mode(h[2]);
  s.params.canonical = h[3];
  if (h[4].size() != 16) throw IntegrityError("bad policy digest '" + h[4] + "'");
  try {
    s.params.policy_digest = std::stoull(h[4], nullptr, 16);
  } catch (const std::exception&) {
    throw IntegrityError("bad policy digest '" + h[4] + "'");
  }
  s.planned_segments = field_u64(h[5], "planned segments");

  while (std::getline(lines, line)) {
    SegmentRecord r = parse_record(line);
    if (r.segment_index != s.segments.size()) throw IntegrityError("checkpoint segments out of order");
    s.segments.push_back(r);
  }
  if (s.segments.size() > s.planned_segments) throw IntegrityError("checkpoint holds more segments than planned");
  s.recompute_totals();
  return s;
}

SearchSummary checkpoint_resume(const std::filesystem::path& path, const SearchParams& expected) {
  SearchSummary s = checkpoint_read(path);
  if (!(s.params == expected)) {
    throw IntegrityError("checkpoint parameters digest " + hex64(s.params.digest()) + " does not match run " +
                         hex64(expected.digest()));
  }
  return s;
}

}  // namespace projprime::search
