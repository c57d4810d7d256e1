#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace arbcost {

/// Guard for every degenerate denominator (σ₂−σ₁, v₂−v₁, σ*−v*, ...).
inline constexpr double kTolVol = 1e-10;

/// Standard normal CDF. erfc keeps full relative precision in the lower tail.
inline double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

inline double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Pairwise summation in a fixed tree order: the result depends only on the
/// values, never on how the caller produced them.
inline double pairwise_sum(std::span<const double> xs) noexcept {
  constexpr std::size_t kLeaf = 32;
  if (xs.size() <= kLeaf) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;

  double std_error() const noexcept {
    return count > 1 ? std::sqrt(variance / static_cast<double>(count)) : 0.0;
  }
};

inline SampleStats sample_stats(std::span<const double> xs) {
  SampleStats s;
  s.count = xs.size();
  if (xs.empty()) return s;
  s.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - s.mean) * (xs[i] - s.mean);
  s.variance = xs.size() > 1 ? pairwise_sum(dev) / static_cast<double>(xs.size() - 1) : 0.0;
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

/// Kolmogorov–Smirnov distance between the empirical law of `sample` and
/// N(mean, sd²). The sample is copied and sorted.
inline double ks_distance_normal(std::span<const double> sample, double mean, double sd) {
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf((xs[i] - mean) / sd);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Least-squares slope of log(err) against log(h); the empirical order of a
/// refinement sequence.
inline double empirical_order(std::span<const double> h, std::span<const double> err) {
  const std::size_t n = std::min(h.size(), err.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace arbcost
