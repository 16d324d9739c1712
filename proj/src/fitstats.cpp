#include "projprime/fitstats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "projprime/errors.hpp"

namespace projprime::fitstats {

std::vector<UV> loglog_transform(const std::vector<Point>& points) {
  std::vector<UV> out;
  out.reserve(points.size());
  for (const Point& p : points) {
    if (!(p.x > std::numbers::e_v<long double>)) throw DomainError("loglog_transform: x must exceed e");
    if (!(p.y > 0)) throw DomainError("loglog_transform: y must be positive");
    out.push_back({std::log(std::log(p.x)), std::log(p.x / p.y)});
  }
  return out;
}

Line least_squares_line(const std::vector<UV>& points) {
  if (points.size() < 2) throw DomainError("least squares needs at least two points");
  const long double n = static_cast<long double>(points.size());
  long double su = 0, sv = 0;
  for (const UV& p : points) {
    su += p.u;
    sv += p.v;
  }
  const long double mu = su / n, mv = sv / n;
  long double suu = 0, suv = 0;
  for (const UV& p : points) {
    suu += (p.u - mu) * (p.u - mu);
    suv += (p.u - mu) * (p.v - mv);
  }
  if (suu == 0) throw DomainError("degenerate fit: all u values are equal");
  Line line;
  line.alpha = suv / suu;
  line.a = mv - line.alpha * mu;
  return line;
}

FitResult FitResult::from_points(const std::vector<Point>& points) {
  const std::vector<UV> uv = loglog_transform(points);
  const Line line = least_squares_line(uv);
  FitResult fit;
  fit.a = line.a;
  fit.alpha = line.alpha;
  fit.C = std::exp(-line.a);
  long double ss = 0;
  for (const UV& p : uv) {
    const long double f = line.a + line.alpha * p.u;
    fit.residuals.push_back({p.u, p.v, f});
    ss += (p.v - f) * (p.v - f);
  }
  fit.rms_residual = std::sqrt(ss / static_cast<long double>(uv.size()));
  return fit;
}

FitResult FitResult::from_constants(long double C, long double alpha) {
  if (!(C > 0)) throw DomainError("fit constant C must be positive");
  FitResult fit;
  fit.C = C;
  fit.a = -std::log(C);
  fit.alpha = alpha;
  return fit;
}

long double rectified_estimate(long double x, const FitResult& fit) {
  if (!(x > std::numbers::e_v<long double>)) throw DomainError("rectified_estimate: x must exceed e");
  return fit.C * x / std::pow(std::log(x), fit.alpha);
}

long double segment_estimate(long double a_lo, long double b_hi, const FitResult& fit) {
  if (!(a_lo > std::numbers::e_v<long double>)) throw DomainError("segment_estimate: lower bound must exceed e");
  if (b_hi < a_lo) throw DomainError("segment_estimate: bounds out of order");
  if (a_lo == b_hi) return 0;
  return fit.C * (b_hi / std::pow(std::log(b_hi), fit.alpha) - a_lo / std::pow(std::log(a_lo), fit.alpha));
}

RatioReport segment_ratios(const std::vector<search::SegmentRecord>& records, const FitResult& fit) {
  RatioReport out;
  for (const search::SegmentRecord& r : records) {
    if (r.projective_hits == 0) {
      out.zero_hit_segments.push_back(r.segment_index);
      continue;
    }
    const long double lo = std::max<long double>(static_cast<long double>(r.lo), kSegmentFloor);
    const long double hi = std::max<long double>(static_cast<long double>(r.hi), lo);
    SegmentRatio s;
    s.segment_index = r.segment_index;
    s.estimate = segment_estimate(lo, hi, fit);
    s.hits = r.projective_hits;
    s.ratio = s.estimate / static_cast<long double>(r.projective_hits);
    out.ratios.push_back(s);
  }
  return out;
}

Histogram build_histogram(const std::vector<long double>& values, std::size_t bins) {
  if (bins == 0) throw DomainError("histogram needs at least one bin");
  if (values.size() < 2) throw DomainError("degenerate histogram: fewer than two values");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  Histogram h;
  h.r_min = *lo_it;
  h.r_max = *hi_it;
  if (!(h.r_max > h.r_min)) throw DomainError("degenerate histogram: all values identical");

  const long double width = (h.r_max - h.r_min) / static_cast<long double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = h.r_min + width * static_cast<long double>(i);
  h.edges[bins] = h.r_max;
  h.counts.assign(bins, 0);

  long double sum = 0;
  for (long double v : values) {
    std::size_t i = static_cast<std::size_t>((v - h.r_min) / width);
    if (i >= bins) i = bins - 1;
    // Guard against rounding in the division putting v on the wrong side of an edge.
    while (i > 0 && v < h.edges[i]) --i;
    while (i + 1 < bins && v >= h.edges[i + 1]) ++i;
    ++h.counts[i];
    sum += (v - h.r_min) / width;
  }
  h.total = values.size();
  h.mean = sum / static_cast<long double>(h.total);
  long double ss = 0;
  for (long double v : values) {
    const long double d = (v - h.r_min) / width - h.mean;
    ss += d * d;
  }
  h.stddev = std::sqrt(ss / static_cast<long double>(h.total));
  return h;
}

long double normal_density(long double x, long double mean, long double stddev) {
  if (!(stddev > 0)) throw DomainError("normal_density: stddev must be positive");
  const long double z = (x - mean) / stddev;
  return std::exp(-0.5L * z * z) / (stddev * std::sqrt(2.0L * std::numbers::pi_v<long double>));
}

}  // namespace projprime::fitstats
