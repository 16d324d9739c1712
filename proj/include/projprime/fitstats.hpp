#pragma once

// Fitting y = C x / ln(x)^alpha in (ln ln x, ln(x/y)) coordinates, segment
// ratios against the fitted model, and histograms of those ratios.

#include <cstdint>
#include <istream>
#include <vector>

#include "projprime/search.hpp"

namespace projprime::fitstats {

struct Point {
  long double x = 0;
  long double y = 0;
};

struct UV {
  long double u = 0;
  long double v = 0;
};

/// u = ln ln x, v = ln(x/y).  DomainError for x <= e or y <= 0.
std::vector<UV> loglog_transform(const std::vector<Point>& points);

struct Line {
  long double a = 0;      // intercept
  long double alpha = 0;  // slope
};

/// Ordinary least squares v = a + alpha u.  DomainError with fewer than two
/// points or when every u is equal.
Line least_squares_line(const std::vector<UV>& points);

struct Residual {
  long double u = 0;
  long double v = 0;
  long double fitted = 0;
};

struct FitResult {
  long double a = 0;
  long double C = 1;  // e^-a
  long double alpha = 0;
  std::vector<Residual> residuals;
  long double rms_residual = 0;

  static FitResult from_points(const std::vector<Point>& points);
  static FitResult from_constants(long double C, long double alpha);
};

/// C x / ln(x)^alpha.  DomainError for x <= e.
long double rectified_estimate(long double x, const FitResult& fit);

/// C (b/ln(b)^alpha - a/ln(a)^alpha).  DomainError unless e < a <= b.
long double segment_estimate(long double a_lo, long double b_hi, const FitResult& fit);

struct SegmentRatio {
  std::uint64_t segment_index = 0;
  long double estimate = 0;
  std::uint64_t hits = 0;
  long double ratio = 0;
};

struct RatioReport {
  std::vector<SegmentRatio> ratios;
  std::vector<std::uint64_t> zero_hit_segments;  // excluded from ratios
};

/// Lower bounds below 3 are raised to 3 so the logarithms stay defined.
inline constexpr long double kSegmentFloor = 3;

RatioReport segment_ratios(const std::vector<search::SegmentRecord>& records, const FitResult& fit);

struct Histogram {
  std::vector<long double> edges;  // bins + 1
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  long double r_min = 0;
  long double r_max = 0;
  long double mean = 0;    // in bin units: (v - r_min) / width
  long double stddev = 0;  // population standard deviation, bin units
};

/// Equal-width bins over [min, max]; the last bin is closed on the right.
/// DomainError for bins == 0 or fewer than two distinct values.
Histogram build_histogram(const std::vector<long double>& values, std::size_t bins = 100);

/// DomainError for stddev <= 0.
long double normal_density(long double x, long double mean, long double stddev);

// CSV ingestion.  Lines starting with '#' and non-numeric header lines are
// skipped.
std::vector<Point> read_points_csv(std::istream& in);
/// Segment records in checkpoint field order; checkpoint files are accepted
/// as they are.
std::vector<search::SegmentRecord> read_records_csv(std::istream& in);
/// One value per line, or the last column of a comma-separated line.
std::vector<long double> read_values_csv(std::istream& in);

}  // namespace projprime::fitstats
