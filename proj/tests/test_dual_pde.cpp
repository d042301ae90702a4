#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "catou/dual_pde.hpp"

using namespace catou;
using namespace catou::dual;
using kernels::GaussianBump;
using kernels::GridFunction;
using kernels::PeriodicGrid;

namespace {

const PeriodicGrid kGrid{1, 256, -8.0, 16.0};

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

DualProblem bump_problem(double t1, ReactionScheme r = ReactionScheme::automatic) {
  DualProblem p;
  p.psi = GridFunction::sample(kGrid, GaussianBump{1.5, 0.0, 0.6});
  const GaussianBump shape{1.0, 0.5, 0.8};
  p.forcing = [shape](double s, std::span<double> out) {
    for (int i = 0; i < kGrid.n; ++i) out[i] = (1.0 + std::sin(3.0 * s)) * shape(kGrid.coord(i));
  };
  p.t1 = t1;
  p.reaction = r;
  return p;
}

}  // namespace

TEST(Dual, ConstantDataHasRiccatiSolution) {
  DualProblem p;
  p.psi = GridFunction::constant(kGrid, 2.0);
  p.t1 = 1.5;
  const auto sol = solve_dual(p, 0.1);
  for (std::size_t i = 0; i < sol.times.size(); ++i)
    EXPECT_NEAR(sol.u[i][17], 2.0 / (1.0 + 2.0 * sol.times[i]), 1e-6);
  EXPECT_EQ(sol.scheme, "strang+riccati");
}

TEST(Dual, ConstantForcingFromZero) {
  const double c = 3.0;
  DualProblem p;
  p.psi = GridFunction::constant(kGrid, 0.0);
  p.forcing = [c](double, std::span<double> out) { std::fill(out.begin(), out.end(), c); };
  p.t1 = 2.0;
  const auto sol = solve_dual(p, 0.05);
  for (std::size_t i = 0; i < sol.times.size(); ++i)
    EXPECT_NEAR(sol.u[i][100], std::sqrt(c) * std::tanh(std::sqrt(c) * sol.times[i]), 1e-6);
}

TEST(Dual, ZeroDataStaysZero) {
  DualProblem p;
  p.psi = GridFunction::constant(kGrid, 0.0);
  const auto sol = solve_dual(p, 0.1);
  for (double v : sol.final()) EXPECT_EQ(v, 0.0);
}

TEST(Dual, ImplicitMidpointIsSecondOrder) {
  const auto p = bump_problem(1.0, ReactionScheme::implicit_midpoint);
  const auto ref = solve_dual(p, 1.0 / 2048, false).final();
  double prev = 0.0;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
    const double e = sup_diff(solve_dual(p, dt, false).final(), ref);
    if (prev > 0.0) {
      EXPECT_GT(prev / e, 3.2) << dt;
      EXPECT_LT(prev / e, 4.8) << dt;
    }
    prev = e;
  }
}

TEST(Dual, PicardOracleAgreesWithSplitting) {
  DualProblem c;
  c.psi = GridFunction::constant(kGrid, 1.0);
  const auto pic = picard_volterra_oracle(c, 0.005, 200);
  EXPECT_NEAR(pic.final()[10], 0.5, 1e-4);

  const auto p = bump_problem(1.0);
  const auto a = picard_volterra_oracle(p, 0.005, 200);
  const auto b = solve_dual(p, 0.005, false);
  EXPECT_LT(sup_diff(a.final(), b.final()), 1e-4);
  EXPECT_GT(a.iterations, 1);
}

TEST(Dual, PropagatorComposes) {
  auto p = bump_problem(1.0);
  const auto fine = solve_dual(p, 1e-4, false).final();
  const auto oneshot = solve_dual(p, 0.01, false).final();
  auto first = p;
  first.t1 = 0.37;
  auto second = p;
  second.t0 = 0.37;
  second.psi.values = solve_dual(first, 0.01, false).final();
  const auto composed = solve_dual(second, 0.01, false).final();
  EXPECT_LE(sup_diff(composed, oneshot), 2.0 * sup_diff(oneshot, fine) + 1e-12);
}

TEST(Dual, MonotoneInData) {
  auto lo = bump_problem(1.0), hi = bump_problem(1.0);
  for (auto& v : hi.psi.values) v += 0.2;
  const auto a = solve_dual(lo, 0.01, false).final(), b = solve_dual(hi, 0.01, false).final();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(a[i], b[i] + 1e-14);
}

TEST(Dual, ContinuousInForcing) {
  auto p = bump_problem(1.0);
  const auto base = solve_dual(p, 0.01, false).final();
  double prev = 1e300;
  for (double eps : {0.1, 0.01, 0.001}) {
    auto q = p;
    q.forcing = [f = p.forcing, eps](double s, std::span<double> out) {
      f(s, out);
      for (auto& v : out) v *= 1.0 + eps;
    };
    const double d = sup_diff(solve_dual(q, 0.01, false).final(), base);
    EXPECT_LT(d, prev);
    EXPECT_LT(d, 2.0 * eps);
    prev = d;
  }
}

TEST(Dual, StepFunctionForcingConverges) {
  auto p = bump_problem(1.0);
  const auto ref = solve_dual(p, 1.0 / 512, false).final();
  double prev = 1e300;
  for (int pieces : {4, 16, 64}) {
    auto q = p;
    q.forcing = step_function(p.forcing, 0.0, 1.0, pieces);
    const double e = sup_diff(solve_dual(q, 1.0 / 512, false).final(), ref);
    EXPECT_LT(e, prev / 2.5) << pieces;
    prev = e;
  }
}

TEST(Dual, InvalidInputs) {
  auto p = bump_problem(1.0);
  p.psi.values[3] = -1.0;
  EXPECT_THROW(solve_dual(p, 0.1), std::invalid_argument);
  p = bump_problem(1.0);
  EXPECT_THROW(solve_dual(p, 0.0), std::invalid_argument);
  p.beta = 1.5;
  EXPECT_THROW(solve_dual(p, 0.1), std::invalid_argument);
}

TEST(Dual, FractionalBetaUsesImplicitReaction) {
  auto p = bump_problem(0.5);
  p.beta = 0.5;
  const auto sol = solve_dual(p, 0.01);
  EXPECT_EQ(sol.scheme, "strang+implicit-midpoint");
  for (double v : sol.final()) EXPECT_GE(v, 0.0);
}

TEST(Laplace, TotalMassFromPointMass) {
  const auto mu = superprocess::ParticleMeasure::point_mass(0.0, 1.0, 1);
  const auto psi = GridFunction::constant(kGrid, 1.0);
  EXPECT_NEAR(laplace_functional(mu, psi, {}, 1.0, 0.01), std::exp(-0.5), 1e-6);
}

TEST(Laplace, DensityAndParticlePairingsAgree) {
  const auto u = GridFunction::sample(kGrid, GaussianBump{1.0, 0.3, 1.0});
  const auto dens = GridFunction::sample(kGrid, GaussianBump{1.0 / std::sqrt(2 * M_PI * 0.01), 0.0, 0.1});
  superprocess::ParticleMeasure pm;
  pm.positions = {0.0};
  pm.mass_per_particle = 1.0;
  EXPECT_NEAR(pairing(u.values, kGrid, dens), pairing(u.values, kGrid, pm), 5e-3);
  pm.positions = {0.3 + 16.0};  // periodic wrap
  EXPECT_NEAR(pairing(u.values, kGrid, pm), 1.0, 1e-3);
}

TEST(Laplace, FiniteParticleNumberMatchesGeneratingFunction) {
  // one particle of mass 1/N: q' = N (1 - q)^2 - (Phi/N) q, q(0) = exp(-psi/N); value q^N
  const double N = 5.0, psi = 1.0, phi = 0.5, t = 1.0;
  double q = std::exp(-psi / N);
  const int steps = 20000;
  const double h = t / steps;
  auto rhs = [&](double y) { return N * (1.0 - y) * (1.0 - y) - phi / N * y; };
  for (int k = 0; k < steps; ++k) {
    const double k1 = rhs(q), k2 = rhs(q + 0.5 * h * k1), k3 = rhs(q + 0.5 * h * k2), k4 = rhs(q + h * k3);
    q += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  const PeriodicGrid g{1, 16, -1.0, 2.0};
  LaplaceOptions opt;
  opt.particles = N;
  const InitialMeasure mu = superprocess::ParticleMeasure::point_mass(0.0, 1.0, N);
  auto constant = [phi](double, std::span<double> o) { std::fill(o.begin(), o.end(), phi); };
  const double v = laplace_functional(mu, GridFunction::constant(g, psi), constant, t, 0.01, opt);
  EXPECT_NEAR(v, std::pow(q, N), 1e-12);
  // far from the superprocess value at N = 5
  EXPECT_GT(std::abs(v - laplace_functional(mu, GridFunction::constant(g, psi), constant, t, 0.01)), 1e-4);

  opt.reaction = ReactionScheme::implicit_midpoint;
  EXPECT_NEAR(laplace_functional(mu, GridFunction::constant(g, psi), constant, t, 0.001, opt), std::pow(q, N), 1e-6);
}

TEST(Laplace, LargeParticleNumberRecoversSuperprocess) {
  const auto psi = GridFunction::sample(kGrid, GaussianBump{1.5, 0.0, 0.6});
  const GaussianBump shape{1.0, 0.5, 0.8};
  Forcing f = [shape](double s, std::span<double> out) {
    for (int i = 0; i < kGrid.n; ++i) out[i] = (1.0 + std::sin(3.0 * s)) * shape(kGrid.coord(i));
  };
  const double N = 1e6;
  LaplaceOptions opt;
  opt.particles = N;
  const double inf = laplace_functional(superprocess::ParticleMeasure::point_mass(0.2, 1.0, 8), psi, f, 1.0, 0.01);
  const double fin = laplace_functional(superprocess::ParticleMeasure::point_mass(0.2, 1.0, N), psi, f, 1.0, 0.01, opt);
  EXPECT_NEAR(fin, inf, 1e-5);
}

TEST(Laplace, FiniteParticleNumberValidation) {
  const PeriodicGrid g{1, 16, -1.0, 2.0};
  LaplaceOptions opt;
  opt.particles = 10;
  const auto psi = GridFunction::constant(g, 1.0);
  EXPECT_THROW(laplace_functional(GridFunction::constant(g, 1.0), psi, {}, 1.0, 0.1, opt), std::invalid_argument);
  EXPECT_THROW(laplace_functional(superprocess::ParticleMeasure::point_mass(0.0, 1.0, 20), psi, {}, 1.0, 0.1, opt),
               std::invalid_argument);
  opt.beta = 0.5;
  EXPECT_THROW(laplace_functional(superprocess::ParticleMeasure::point_mass(0.0, 1.0, 10), psi, {}, 1.0, 0.1, opt),
               std::invalid_argument);
}

TEST(Export, SolutionCsvAndMetadata) {
  DualProblem p;
  p.psi = GridFunction::constant(PeriodicGrid{1, 8, 0.0, 1.0}, 1.0);
  p.t1 = 0.2;
  const auto sol = solve_dual(p, 0.1);
  std::ostringstream os;
  write_solution_csv(os, sol);
  EXPECT_EQ(os.str().substr(0, 15), "time,grid_index");
  EXPECT_NE(solution_metadata_json(sol).find("\"scheme\": \"strang+riccati\""), std::string::npos);
}
