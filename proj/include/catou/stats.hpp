#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace catou::stats {

struct Cumulants {
  double mean = 0.0;
  double k2 = 0.0;  // unbiased variance
  double k3 = 0.0;
  double k4 = 0.0;
  double skewness() const;         // k3 / k2^{3/2}
  double excess_kurtosis() const;  // k4 / k2^2
};

// Unbiased k-statistics (Fisher). Needs n >= 4 for k4.
Cumulants k_statistics(std::span<const double> x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

struct McSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double se = 0.0;
  Interval mean_ci;  // bootstrap percentile, 95%
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  Interval kurtosis_ci;
  bool zero_variance = false;
};

// Percentile bootstrap with `resamples` seeded draws. Kurtosis fields are
// left at zero when n < 4.
McSummary mc_summary(std::span<const double> x, std::uint64_t seed, int resamples = 1000,
                     double level = 0.95);

// mean and standard error only; no bootstrap
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_se(std::span<const double> x);

// Percentile bootstrap CI of k4/k2^2.
Interval kurtosis_bootstrap(std::span<const double> x, std::uint64_t seed, int resamples,
                            double level = 0.95);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

double z_score(double estimate, double target, double se);

// quantile with linear interpolation between order statistics; sorts a copy
double quantile(std::vector<double> x, double q);

}  // namespace catou::stats
