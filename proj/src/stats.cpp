#include "catou/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "catou/rng.hpp"

namespace catou::stats {

double Cumulants::skewness() const {
  return k2 > 0.0 ? k3 / std::pow(k2, 1.5) : 0.0;
}

double Cumulants::excess_kurtosis() const {
  return k2 > 0.0 ? k4 / (k2 * k2) : 0.0;
}

Cumulants k_statistics(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) throw std::invalid_argument("k_statistics: need at least 2 samples");
  Cumulants c;
  c.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  // k2..k4 are shift invariant; centring keeps the power sums well conditioned
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (double v : x) {
    const double d = v - c.mean, d2 = d * d;
    s1 += d;
    s2 += d2;
    s3 += d2 * d;
    s4 += d2 * d2;
  }
  c.k2 = (n * s2 - s1 * s1) / (n * (n - 1));
  if (x.size() >= 3)
    c.k3 = (2 * s1 * s1 * s1 - 3 * n * s1 * s2 + n * n * s3) / (n * (n - 1) * (n - 2));
  if (x.size() >= 4)
    c.k4 = (-6 * std::pow(s1, 4) + 12 * n * s1 * s1 * s2 - 3 * n * (n - 1) * s2 * s2 -
            4 * n * (n + 1) * s1 * s3 + n * n * (n + 1) * s4) /
           (n * (n - 1) * (n - 2) * (n - 3));
  return c;
}

MeanSe mean_se(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("mean_se: need at least 2 samples");
  const auto c = k_statistics(x);
  return {c.mean, std::sqrt(std::max(c.k2, 0.0) / static_cast<double>(x.size()))};
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= x.size()) return x.back();
  const double w = pos - static_cast<double>(i);
  return (1 - w) * x[i] + w * x[i + 1];
}

namespace {

template <class Stat>
Interval bootstrap(std::span<const double> x, std::uint64_t seed, int resamples, double level,
                   Stat stat) {
  Philox4x32 g(seed, 0xB007);
  std::vector<double> draw(x.size()), out;
  out.reserve(resamples);
  const double n = static_cast<double>(x.size());
  for (int b = 0; b < resamples; ++b) {
    for (auto& v : draw) v = x[std::min(static_cast<std::size_t>(g.uniform() * n), x.size() - 1)];
    out.push_back(stat(std::span<const double>(draw)));
  }
  const double a = 0.5 * (1.0 - level);
  return {quantile(out, a), quantile(out, 1.0 - a)};
}

}  // namespace

Interval kurtosis_bootstrap(std::span<const double> x, std::uint64_t seed, int resamples,
                            double level) {
  if (x.size() < 4) throw std::invalid_argument("kurtosis_bootstrap: need at least 4 samples");
  return bootstrap(x, seed, resamples, level,
                   [](std::span<const double> s) { return k_statistics(s).excess_kurtosis(); });
}

McSummary mc_summary(std::span<const double> x, std::uint64_t seed, int resamples, double level) {
  if (x.size() < 2) throw std::invalid_argument("mc_summary: need at least 2 samples");
  McSummary s;
  s.n = x.size();
  const auto c = k_statistics(x);
  s.mean = c.mean;
  s.variance = std::max(c.k2, 0.0);
  s.se = std::sqrt(s.variance / static_cast<double>(s.n));
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  s.zero_variance = (*lo == *hi);
  if (s.zero_variance) {
    s.mean_ci = {s.mean, s.mean};
    return s;
  }
  s.skewness = c.skewness();
  s.mean_ci = bootstrap(x, seed, resamples, level, [](std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  });
  if (s.n >= 4) {
    s.excess_kurtosis = c.excess_kurtosis();
    s.kurtosis_ci = kurtosis_bootstrap(x, seed + 1, resamples, level);
  }
  return s;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("least_squares: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / (n - 2) / sxx);
  }
  return f;
}

double z_score(double estimate, double target, double se) {
  if (se > 0.0) return (estimate - target) / se;
  return estimate == target ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), estimate - target);
}

}  // namespace catou::stats
