#pragma once

// Hotspot classification, histograms, log-normal fitting and two-sample
// t-tests on per-venue weekly infection expectations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "venuerisk/error.hpp"

namespace venuerisk {

inline constexpr double kDefaultSevereThreshold = 1.0;

// mild < severe.
enum class Severity { mild = 0, severe = 1 };

inline std::string_view to_string(Severity s) { return s == Severity::severe ? "severe" : "mild"; }

// Exactly at the threshold counts as mild.
inline Severity classify(double weekly_infections, double threshold = kDefaultSevereThreshold) {
  return weekly_infections > threshold ? Severity::severe : Severity::mild;
}

// ---------------------------------------------------------------------------
// Histogram

enum class Scale { linear, log10 };

inline std::string_view to_string(Scale s) { return s == Scale::log10 ? "log10" : "linear"; }

struct Histogram {
  std::vector<double> bin_edges;     // k + 1 ascending edges, in value units
  std::vector<std::size_t> counts;   // k
  Scale scale = Scale::linear;
  std::size_t excluded = 0;          // non-finite values, plus non-positive ones on log10

  bool empty() const noexcept { return counts.empty(); }
  std::size_t total() const noexcept { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }
};

namespace detail {

inline bool binnable(double v, Scale scale) { return std::isfinite(v) && (scale == Scale::linear || v > 0.0); }

inline double to_axis(double v, Scale scale) { return scale == Scale::log10 ? std::log10(v) : v; }

inline double from_axis(double a, Scale scale) { return scale == Scale::log10 ? std::pow(10.0, a) : a; }

// Bins the includable values over [lo, hi] given on the axis scale.
inline Histogram bin_over(std::span<const double> values, std::size_t bins, Scale scale, double lo, double hi) {
  Histogram h;
  h.scale = scale;
  for (double v : values) {
    if (!binnable(v, scale)) ++h.excluded;
  }
  if (lo == hi) {
    // Degenerate range: one bin padded by one ulp on each side.
    const double v = from_axis(lo, scale);
    h.bin_edges = {std::nextafter(v, -std::numeric_limits<double>::infinity()),
                   std::nextafter(v, std::numeric_limits<double>::infinity())};
    h.counts = {values.size() - h.excluded};
    return h;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i < bins; ++i) h.bin_edges[i] = from_axis(lo + width * static_cast<double>(i), scale);
  h.bin_edges[bins] = from_axis(hi, scale);
  h.counts.assign(bins, 0);
  for (double v : values) {
    if (!binnable(v, scale)) continue;
    const double pos = (to_axis(v, scale) - lo) / width;
    auto idx = pos <= 0.0 ? std::size_t{0} : static_cast<std::size_t>(std::floor(pos));
    ++h.counts[std::min(idx, bins - 1)];
  }
  return h;
}

inline bool axis_range(std::span<const double> values, Scale scale, double& lo, double& hi) {
  bool any = false;
  for (double v : values) {
    if (!binnable(v, scale)) continue;
    const double a = to_axis(v, scale);
    if (!any) {
      lo = hi = a;
      any = true;
    } else {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  }
  return any;
}

}  // namespace detail

// Equal-width bins (in the chosen scale) spanning the included values.
// Bins are half-open except the last, which is closed on the right.
// Values that cannot be placed on the scale are counted in `excluded`.
// No includable values gives an empty() histogram, not an error.
inline Histogram histogram(std::span<const double> values, std::size_t bins, Scale scale) {
  if (bins == 0) throw ArgumentError("histogram needs at least one bin");
  double lo = 0.0, hi = 0.0;
  if (!detail::axis_range(values, scale, lo, hi)) {
    Histogram h;
    h.scale = scale;
    h.excluded = values.size();
    return h;
  }
  return detail::bin_over(values, bins, scale, lo, hi);
}

// Two histograms on shared edges spanning both samples, for overlay plots.
inline std::pair<Histogram, Histogram> aligned_histograms(std::span<const double> a, std::span<const double> b,
                                                          std::size_t bins, Scale scale) {
  if (bins == 0) throw ArgumentError("histogram needs at least one bin");
  double lo_a = 0, hi_a = 0, lo_b = 0, hi_b = 0;
  const bool has_a = detail::axis_range(a, scale, lo_a, hi_a);
  const bool has_b = detail::axis_range(b, scale, lo_b, hi_b);
  if (!has_a && !has_b) return {histogram(a, bins, scale), histogram(b, bins, scale)};
  const double lo = has_a && has_b ? std::min(lo_a, lo_b) : (has_a ? lo_a : lo_b);
  const double hi = has_a && has_b ? std::max(hi_a, hi_b) : (has_a ? hi_a : hi_b);
  return {detail::bin_over(a, bins, scale, lo, hi), detail::bin_over(b, bins, scale, lo, hi)};
}

// ---------------------------------------------------------------------------
// Log-normal maximum likelihood

struct LogNormalFit {
  double mu = 0.0;
  double sigma = 0.0;
};

// mu and sigma are the mean and population standard deviation of ln(x).
inline LogNormalFit fit_log_normal(std::span<const double> values) {
  if (values.size() < 2) throw ArgumentError("log-normal fit needs at least two values");
  std::vector<double> logs;
  logs.reserve(values.size());
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError("log-normal fit needs positive finite values");
    logs.push_back(std::log(v));
  }
  const double n = static_cast<double>(logs.size());
  const double mu = std::accumulate(logs.begin(), logs.end(), 0.0) / n;
  double ss = 0.0;
  for (double l : logs) ss += (l - mu) * (l - mu);
  const double sigma = std::sqrt(ss / n);
  if (!(sigma > 0.0)) throw ArgumentError("log-normal fit of constant data has zero sigma");
  return {mu, sigma};
}

// ---------------------------------------------------------------------------
// Regularized incomplete beta and Student t tail

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly for
// x < (a + 1) / (a + b + 2).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  throw Error("incomplete beta continued fraction did not converge");
}

// I_x(a, b) with y = 1 - x passed separately so callers can avoid
// cancellation when x is close to 1.
inline double incomplete_beta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(y);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

}  // namespace detail

inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("incomplete beta needs positive shape parameters");
  if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("incomplete beta argument must lie in [0, 1]");
  return detail::incomplete_beta(a, b, x, 1.0 - x);
}

// P(|T| >= |t|) for Student t with df degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw ArgumentError("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  return std::clamp(detail::incomplete_beta(0.5 * df, 0.5, x, y), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Two-sample t-tests

struct TTestResult {
  double t_stat = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
};

namespace detail {

struct SampleMoments {
  double n;
  double mean;
  double variance;  // unbiased
};

inline SampleMoments moments(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {n, mean, ss / (n - 1.0)};
}

inline void check_samples(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ArgumentError("t-test needs at least two values per sample");
  for (auto s : {a, b}) {
    for (double x : s) {
      if (!std::isfinite(x)) throw ArgumentError("t-test samples must be finite");
    }
  }
}

// Both variances zero: equal means give t = 0, p = 1; otherwise t is undefined.
inline TTestResult degenerate_result(const SampleMoments& ma, const SampleMoments& mb, double df) {
  if (ma.mean != mb.mean) throw ArgumentError("t-test undefined: both samples constant with different means");
  return {0.0, df, 1.0, ma.mean, mb.mean};
}

}  // namespace detail

// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
// freedom and a two-sided p-value.
inline TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  detail::check_samples(a, b);
  const auto ma = detail::moments(a);
  const auto mb = detail::moments(b);
  const double sa = ma.variance / ma.n;
  const double sb = mb.variance / mb.n;
  const double se2 = sa + sb;
  if (se2 == 0.0) return detail::degenerate_result(ma, mb, ma.n + mb.n - 2.0);
  const double t = (ma.mean - mb.mean) / std::sqrt(se2);
  const double df = se2 * se2 / (sa * sa / (ma.n - 1.0) + sb * sb / (mb.n - 1.0));
  return {t, df, student_t_two_sided_p(t, df), ma.mean, mb.mean};
}

// Classic pooled-variance Student t-test.
inline TTestResult pooled_t_test(std::span<const double> a, std::span<const double> b) {
  detail::check_samples(a, b);
  const auto ma = detail::moments(a);
  const auto mb = detail::moments(b);
  const double df = ma.n + mb.n - 2.0;
  const double pooled = ((ma.n - 1.0) * ma.variance + (mb.n - 1.0) * mb.variance) / df;
  if (pooled == 0.0) return detail::degenerate_result(ma, mb, df);
  const double t = (ma.mean - mb.mean) / std::sqrt(pooled * (1.0 / ma.n + 1.0 / mb.n));
  return {t, df, student_t_two_sided_p(t, df), ma.mean, mb.mean};
}

struct ComparisonResult {
  double t_stat = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  bool pooled = false;
  Histogram histogram_a;
  Histogram histogram_b;
};

inline ComparisonResult compare_samples(std::span<const double> a, std::span<const double> b, std::size_t bins,
                                        Scale scale, bool pooled = false) {
  const auto test = pooled ? pooled_t_test(a, b) : welch_t_test(a, b);
  auto [ha, hb] = aligned_histograms(a, b, bins, scale);
  return {test.t_stat, test.degrees_of_freedom, test.p_value, test.mean_a, test.mean_b, pooled,
          std::move(ha), std::move(hb)};
}

}  // namespace venuerisk
