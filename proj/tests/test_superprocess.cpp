#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "catou/stats.hpp"
#include "catou/superprocess.hpp"

using namespace catou;
using namespace catou::superprocess;

namespace {

const HeatKernelParams kSbm{1.0, 1, 2.0};

template <class F>
stats::MeanSe mc(int n, F f) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = f(static_cast<std::uint64_t>(i));
  return stats::mean_se(x);
}

}  // namespace

TEST(AtomCatalyst, StartsAtOriginWithUnitMass) {
  const auto p = simulate_atom_catalyst(1.0, 0.1, 2, 5);
  ASSERT_EQ(p.states.front().count(), 1u);
  EXPECT_EQ(p.states.front().positions, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(p.states.front().total_mass(), 1.0);
  EXPECT_EQ(p.kind, CatalystKind::atom);
  EXPECT_NO_THROW(p.validate());
  EXPECT_NEAR(p.times.back(), 1.0, 1e-15);
}

TEST(AtomCatalyst, TerminalMoments) {
  const int n = 20000;
  std::vector<double> b(n), b2(n);
  for (int i = 0; i < n; ++i) {
    b[i] = simulate_atom_catalyst(2.0, 0.25, 1, 9, i).states.back().positions[0];
    b2[i] = b[i] * b[i];
  }
  const auto m = stats::mean_se(b);
  EXPECT_LT(std::abs(m.mean), 3 * m.se);
  const auto v = stats::mean_se(b2);
  EXPECT_LT(std::abs(v.mean - 2.0), 3 * v.se);
}

TEST(Pairing, ConstantsAndCounts) {
  ParticleMeasure m;
  m.positions = {-1.0, 0.2, 0.4, 0.9, 3.0};
  m.mass_per_particle = 0.25;
  EXPECT_DOUBLE_EQ(measure_pairing(m, [](double) { return 1.0; }), m.total_mass());
  EXPECT_EQ(measure_pairing(m, [](double) { return 0.0; }), 0.0);
  int inside = 0;
  for (double x : m.positions) inside += (x >= 0.0 && x < 1.0);
  EXPECT_DOUBLE_EQ(measure_pairing(m, [](double x) { return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0; }), 0.25 * inside);
}

TEST(Occupation, TrivialCases) {
  const auto times = uniform_times(2.0, 0.1);
  const auto frozen = frozen_path(ParticleMeasure::point_mass(0.0, 1.0, 1.0), times);
  EXPECT_EQ(occupation_integral(frozen, [](double, double) { return 0.0; }), 0.0);
  EXPECT_NEAR(occupation_integral(frozen, [](double, double) { return 1.0; }), 2.0, 1e-14);
}

TEST(Sbm, DeterministicReplay) {
  const auto init = ParticleMeasure::point_mass(0.0, 1.0, 20);
  const auto a = simulate_sbm(init, 20, 1.0, 0.1, kSbm, 77, 3);
  const auto b = simulate_sbm(init, 20, 1.0, 0.1, kSbm, 77, 3);
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) EXPECT_EQ(a.states[i].positions, b.states[i].positions);
  const auto c = simulate_sbm(init, 20, 1.0, 0.1, kSbm, 77, 4);
  EXPECT_NE(a.states.back().positions, c.states.back().positions);
}

TEST(Sbm, MassMeanAndVariance) {
  const auto init = ParticleMeasure::point_mass(0.0, 1.0, 20);
  std::vector<double> m(6000), m2(6000);
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = simulate_sbm(init, 20, 1.0, 0.5, kSbm, 1, i).states.back().total_mass();
    m2[i] = (m[i] - 1.0) * (m[i] - 1.0);
  }
  const auto a = stats::mean_se(m);
  EXPECT_LT(std::abs(a.mean - 1.0), 3 * a.se);
  const auto v = stats::mean_se(m2);
  EXPECT_LT(std::abs(v.mean - 2.0), 3 * v.se) << v.mean << " +- " << v.se;
}

TEST(Sbm, FirstMomentOfBump) {
  const kernels::GaussianBump bump{1.0, 0.5, 0.3};
  const double t = 0.5;
  const auto init = ParticleMeasure::point_mass(0.0, 1.0, 20);
  const auto r = mc(4000, [&](std::uint64_t i) {
    return measure_pairing(simulate_sbm(init, 20, t, t, kSbm, 2, i).states.back(), bump);
  });
  EXPECT_LT(std::abs(r.mean - bump.smoothed(t, 0.0, 1.0)), 3 * r.se);
}

TEST(Sbm, ExpectedOccupationEqualsHorizon) {
  const auto init = ParticleMeasure::point_mass(0.0, 1.0, 10);
  const auto r = mc(3000, [&](std::uint64_t i) {
    return occupation_integral(simulate_sbm(init, 10, 1.0, 0.05, kSbm, 3, i), [](double, double) { return 1.0; });
  });
  EXPECT_LT(std::abs(r.mean - 1.0), 3 * r.se);
}

TEST(Sbm, PerStepSchemeWarnsOnCoarseSteps) {
  const auto init = ParticleMeasure::point_mass(0.0, 1.0, 10);
  SbmOptions opt;
  opt.scheme = BranchingScheme::per_step;
  EXPECT_FALSE(simulate_sbm(init, 10, 1.0, 0.1, kSbm, 1, 0, opt).warnings.empty());
  EXPECT_TRUE(simulate_sbm(init, 10, 0.1, 0.001, kSbm, 1, 0, opt).warnings.empty());
}

TEST(Sbm, RejectsUnsupportedRegimeAndBadInput) {
  const auto init = ParticleMeasure::point_mass(0.0, 1.0, 10);
  EXPECT_THROW(simulate_sbm(init, 10, 1.0, 0.1, {1.0, 1, 1.5}, 1), std::invalid_argument);
  EXPECT_THROW(simulate_sbm(init, 20, 1.0, 0.1, kSbm, 1), std::invalid_argument);
  EXPECT_THROW(simulate_sbm(init, 10, 1.0, -0.1, kSbm, 1), std::invalid_argument);
}

TEST(Sbm, PopulationCap) {
  const auto init = ParticleMeasure::point_mass(0.0, 1.0, 50);
  SbmOptions opt;
  opt.population_cap = 60;
  EXPECT_THROW(
      {
        for (std::uint64_t s = 0; s < 50; ++s) simulate_sbm(init, 50, 2.0, 0.5, kSbm, s, 0, opt);
      },
      PopulationOverflow);
}

TEST(MassChain, TransitionLawMatchesLaplaceExponent) {
  const double times[3] = {0.0, 0.5, 1.0};
  const int n = 20000;
  std::vector<double> e(n), v(n);
  for (int i = 0; i < n; ++i) {
    const auto m = simulate_mass(1.0, 500, times, 4, i);
    e[i] = std::exp(-1.0 * m[2]);
    v[i] = (m[2] - 1.0) * (m[2] - 1.0);
  }
  const auto a = stats::mean_se(e);
  EXPECT_LT(std::abs(a.mean - std::exp(-0.5)), 3 * a.se);
  const auto b = stats::mean_se(v);
  EXPECT_LT(std::abs(b.mean - 2.0), 3 * b.se);
}

TEST(MassChain, TrajectoryOccupation) {
  MassTrajectory m;
  m.mass_per_particle = 0.5;
  m.horizon = 3.0;
  m.jump_times = {0.0, 1.0, 2.5};
  m.counts = {2, 3, 1};
  // mass 1 on [0,1), 1.5 on [1,2.5), 0.5 on [2.5,3]
  const double breaks[2] = {0.0, 2.0}, values[2] = {1.0, 10.0};
  EXPECT_NEAR(m.weighted_occupation(breaks, values), 1.0 + 1.5 * 1.0 + 10 * (1.5 * 0.5 + 0.5 * 0.5), 1e-14);
  EXPECT_DOUBLE_EQ(m.mass_at(1.2), 1.5);
  const auto r = mc(4000, [](std::uint64_t i) {
    const double b[1] = {0.0}, w[1] = {1.0};
    return simulate_mass_trajectory(1.0, 50, 1.0, 8, i).weighted_occupation(b, w);
  });
  EXPECT_LT(std::abs(r.mean - 1.0), 3 * r.se);
}

TEST(Export, CsvAndSidecar) {
  const auto p = simulate_atom_catalyst(0.2, 0.1, 1, 1);
  std::ostringstream os;
  const CatalystPath paths[1] = {p};
  write_paths_csv(os, paths);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "replica,time_index,time,particle_index,x1");
  EXPECT_NE(sidecar_json(p).find("\"kind\": \"atom\""), std::string::npos);
}
