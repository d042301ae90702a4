#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "catou/rng.hpp"
#include "catou/stats.hpp"

using namespace catou;

// Known-answer vectors from the Random123 distribution (kat_vectors, philox4x32_10).
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(Philox4x32::block({0, 0, 0, 0}, {0, 0}),
            (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
  Philox4x32 a(42, 7), b(42, 7), c(42, 8);
  int same_c = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    same_c += (x == c());
  }
  EXPECT_LT(same_c, 3);
}

TEST(Philox, UniformIsOpenInterval) {
  Philox4x32 g(1, 1);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 3 * std::sqrt(1.0 / 12 / 100000));
}

TEST(Stats, KStatisticsMatchReference) {
  // reference values from scipy.stats.kstat
  const std::vector<double> x{0.3, 1.7, -0.4, 2.2, 0.9, 5.1, -1.3, 0.0};
  const auto c = stats::k_statistics(x);
  EXPECT_NEAR(c.k2, 3.9226785714285706, 1e-12);
  EXPECT_NEAR(c.k3, 9.445053571428573, 1e-11);
  EXPECT_NEAR(c.k4, 29.144121071428525, 1e-10);
}

TEST(Stats, ConstantSamplesFlagZeroVariance) {
  const std::vector<double> x{1, 1, 1, 1};
  const auto s = stats::mc_summary(x, 3);
  EXPECT_EQ(s.mean, 1.0);
  EXPECT_EQ(s.se, 0.0);
  EXPECT_TRUE(s.zero_variance);
}

TEST(Stats, RejectsSingleSample) {
  const std::vector<double> x{1.0};
  EXPECT_THROW(stats::mc_summary(x, 1), std::invalid_argument);
}

TEST(Stats, NormalCalibration) {
  Philox4x32 g(11, 0);
  std::normal_distribution<double> n;
  std::vector<double> x(100000);
  for (auto& v : x) v = n(g);
  const auto s = stats::mc_summary(x, 5);
  EXPECT_TRUE(s.kurtosis_ci.contains(0.0)) << s.kurtosis_ci.lo << " " << s.kurtosis_ci.hi;
  EXPECT_TRUE(s.mean_ci.contains(0.0));
}

TEST(Stats, ExponentialCumulants) {
  Philox4x32 g(12, 0);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(100000);
  for (auto& v : x) v = e(g);
  const auto s = stats::mc_summary(x, 6);
  EXPECT_TRUE(s.kurtosis_ci.contains(6.0)) << s.kurtosis_ci.lo << " " << s.kurtosis_ci.hi;
  EXPECT_NEAR(s.skewness, 2.0, 0.15);
}

TEST(Stats, LeastSquaresMatchesReference) {
  // numpy.polyfit([1,2,3,4], [2.0,2.9,4.2,4.8], 1) -> [0.97, 1.05]
  const std::vector<double> x{1, 2, 3, 4}, y{2.0, 2.9, 4.2, 4.8};
  const auto f = stats::least_squares(x, y);
  EXPECT_NEAR(f.slope, 0.97, 1e-12);
  EXPECT_NEAR(f.intercept, 1.05, 1e-12);
}

TEST(Stats, ZScore) {
  EXPECT_NEAR(stats::z_score(1.3, 1.0, 0.1), 3.0, 1e-12);
  EXPECT_EQ(stats::z_score(1.0, 1.0, 0.0), 0.0);
  EXPECT_TRUE(std::isinf(stats::z_score(1.1, 1.0, 0.0)));
}
