#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "catou/gaussian_field.hpp"
#include "catou/quadrature.hpp"

using namespace catou;
using namespace catou::field;
using kernels::GaussianBump;
using std::numbers::pi;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

CatalystPath frozen(const ParticleMeasure& m, std::vector<double> times) { return superprocess::frozen_path(m, times); }

template <class F>
stats::MeanSe mc(int n, F f) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = f(static_cast<std::uint64_t>(i));
  return stats::mean_se(x);
}

}  // namespace

TEST(KernelProduct, MatchesQuadrature1d) {
  const double x[1] = {0.2}, y[1] = {-0.3}, u[1] = {0.4};
  const double kappa = 0.5, t0 = 0.05, t1 = 0.8;
  const auto r = integrate(
      [&](double tau) { return kernels::heat_kernel(tau, x[0], u[0], kappa) * kernels::heat_kernel(tau, y[0], u[0], kappa); },
      t0, t1, {1e-13, 1e-11, 20});
  EXPECT_NEAR(kernel_product_integral(x, y, u, t0, t1, kappa), r.value, 1e-10);
}

TEST(KernelProduct, MatchesQuadrature2dAndOrigin) {
  const double x[2] = {0.1, 0.0}, y[2] = {0.0, 0.2}, u[2] = {0.3, -0.1};
  const HeatKernelParams p{1.0, 2, 2.0};
  const auto r = integrate([&](double tau) { return kernels::heat_kernel(tau, x, u, p) * kernels::heat_kernel(tau, y, u, p); },
                           0.0, 1.0, {1e-13, 1e-11, 20});
  EXPECT_NEAR(kernel_product_integral(x, y, u, 0.0, 1.0, 1.0), r.value, 1e-9);
  const double o[1] = {0.0};
  EXPECT_EQ(kernel_product_integral(o, o, o, 0.0, 1.0, 0.5), kInf);
  EXPECT_NEAR(kernel_product_integral(o, o, o, 0.5, 1.0, 0.5), std::log(2.0) / (2 * pi), 1e-14);
}

TEST(QuenchedCovariance, EmptyCatalystGivesZero) {
  ParticleMeasure empty;
  empty.mass_per_particle = 0.1;
  const double pts[3] = {-0.5, 0.0, 0.5};
  const auto c = quenched_covariance(frozen(empty, {0.0, 0.5, 1.0}), pts, 1.0, 0.5);
  EXPECT_EQ(c.gamma.cwiseAbs().maxCoeff(), 0.0);
  const auto s = sample_quenched_field(c, 10, 1);
  EXPECT_EQ(s.cwiseAbs().maxCoeff(), 0.0);
}

TEST(QuenchedCovariance, LebesgueCatalystDiagonal) {
  const auto leb = ParticleMeasure::uniform_cloud(-12.0, 12.0, 24.0, 9600);
  const double t = 1.0, pts[2] = {0.0, 0.3};
  const auto c = quenched_covariance(frozen(leb, {0.0, t}), pts, t, 0.5);
  EXPECT_NEAR(c.gamma(0, 0), std::sqrt(t / pi), 1e-3);
  // off diagonal: int_0^t p(2 tau, 0, 0.3) dtau with kappa = 1/2
  const auto r = integrate([](double tau) { return kernels::heat_kernel(2 * tau, 0.0, 0.3, 0.5); }, 0.0, t);
  EXPECT_NEAR(c.gamma(0, 1), r.value, 1e-3);
  EXPECT_EQ(c.gamma(0, 1), c.gamma(1, 0));
}

TEST(QuenchedCovariance, FrozenAtomOnPointDiverges) {
  const double pts[2] = {0.0, 1.0};
  const auto c = quenched_covariance(frozen(ParticleMeasure::point_mass(0.0, 1.0, 1.0), {0.0, 1.0}), pts, 1.0, 0.5);
  EXPECT_TRUE(c.divergent);
  EXPECT_EQ(c.gamma(0, 0), kInf);
  EXPECT_TRUE(std::isfinite(c.gamma(1, 1)));
  EXPECT_THROW(sample_quenched_field(c, 1, 1), ConditioningError);
}

TEST(QuenchedCovariance, SerialAndParallelAgreeExactly) {
  const auto path = superprocess::simulate_sbm(ParticleMeasure::point_mass(0.0, 1.0, 30), 30, 1.0, 0.05, {1.0, 1, 2.0}, 5);
  std::vector<double> pts;
  for (int i = 0; i < 12; ++i) pts.push_back(-1.0 + 0.2 * i);
  const auto a = quenched_covariance(path, pts, 1.0, 0.5, Exec::serial);
  const auto b = quenched_covariance(path, pts, 1.0, 0.5, Exec::parallel);
  EXPECT_TRUE(a.gamma == b.gamma);
}

TEST(QuenchedCovariance, AnnealedAtomVarianceIsQuarter) {
  const auto times = superprocess::refined_times(1.0, 0.01, 1.15, 1e-7);
  const double x[1] = {0.0};
  const auto r = mc(3000, [&](std::uint64_t i) {
    return quenched_covariance(superprocess::simulate_atom_catalyst(times, 1, 11, i), x, 1.0, 0.5, Exec::serial).gamma(0, 0);
  });
  EXPECT_LT(std::abs(r.mean - 0.25), 3 * r.se) << r.mean << " +- " << r.se;
}

TEST(Sampler, ScalarVariance) {
  QuenchedCovariance c;
  c.points = {0.0};
  c.gamma = Eigen::MatrixXd::Constant(1, 1, 2.5);
  const auto s = sample_quenched_field(c, 10000, 3);
  std::vector<double> sq(10000);
  for (int i = 0; i < 10000; ++i) sq[i] = s(i, 0) * s(i, 0);
  const auto r = stats::mean_se(sq);
  EXPECT_LT(std::abs(r.mean - 2.5), 3 * r.se);
}

TEST(Sampler, TwoByTwoCorrelation) {
  QuenchedCovariance c;
  c.points = {0.0, 1.0};
  const double rho = -0.6;
  c.gamma.resize(2, 2);
  c.gamma << 1.0, rho * 2.0, rho * 2.0, 4.0;
  const int n = 20000;
  const auto s = sample_quenched_field(c, n, 4);
  std::vector<double> prod(n);
  for (int i = 0; i < n; ++i) prod[i] = s(i, 0) * s(i, 1) / 2.0;
  const auto r = stats::mean_se(prod);
  EXPECT_LT(std::abs(r.mean - rho), 3 * r.se);
  // thread count does not change the draws
  EXPECT_TRUE(sample_quenched_field(c, 50, 4, 0, Exec::serial) == sample_quenched_field(c, 50, 4, 0, Exec::parallel));
}

TEST(Sampler, FactorHandlesSingularAndRejectsIndefinite) {
  Eigen::VectorXd v(3);
  v << 1.0, 2.0, -1.0;
  const Eigen::MatrixXd rank1 = v * v.transpose();
  const GaussianFactor f(rank1);
  Eigen::VectorXd g(3), out;
  g << 0.3, -1.2, 2.0;
  f.apply(g, out);
  EXPECT_NEAR((out - v * (v.dot(out) / v.squaredNorm())).norm(), 0.0, 1e-12);  // samples lie on span(v)
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(1, 1) = -0.5;
  EXPECT_THROW(GaussianFactor{bad}, ConditioningError);
}

TEST(Sampler, FactorReproducesRankDeficientCovariance) {
  // low-rank Gram matrix of many near-collinear columns: PSD, but LDLT pivots drift negative
  const int n = 96, r = 20;
  Eigen::MatrixXd a(n, r);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = std::sin(0.37 * (i + 1) * (j + 1)) * std::exp(-0.05 * i);
  const Eigen::MatrixXd c = a * a.transpose();
  const GaussianFactor f(c);
  Eigen::MatrixXd fm(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n), col;
  for (int i = 0; i < n; ++i) {
    e.setZero();
    e[i] = 1.0;
    f.apply(e, col);
    fm.col(i) = col;
  }
  EXPECT_LT((fm * fm.transpose() - c).cwiseAbs().maxCoeff(), 1e-9 * c.trace());
}

TEST(EigenCovariance, ZeroCatalyst) {
  ParticleMeasure empty;
  const auto eig = kernels::dirichlet_eigensystem(1, 0.5, 5);
  EXPECT_EQ(eigen_step_covariance(frozen(empty, {0.0, 1.0}), eig, 0.2, 0.3).cwiseAbs().maxCoeff(), 0.0);
}

TEST(EigenCovariance, LebesgueClosedForm) {
  const auto leb = ParticleMeasure::uniform_cloud(0.0, 1.0, 1.0, 400);
  const auto eig = kernels::dirichlet_eigensystem(1, 0.5, 8);
  const double h = 0.13;
  const auto c = eigen_step_covariance(frozen(leb, {0.0, 0.05, 0.1, 0.2, 0.5}), eig, 0.07, h);
  for (int j = 0; j < 8; ++j)
    for (int k = 0; k < 8; ++k) {
      const double lam = eig.lambdas[k];
      EXPECT_NEAR(c(j, k), j == k ? (1 - std::exp(-2 * lam * h)) / (2 * lam) : 0.0, 1e-12);
    }
}

TEST(EigenCovariance, AtomAtMidpoint) {
  const auto eig = kernels::dirichlet_eigensystem(1, 0.5, 6);
  const double h = 0.2;
  const auto c = eigen_step_covariance(frozen(ParticleMeasure::point_mass(0.5, 1.0, 1.0), {0.0, 1.0}), eig, 0.0, h);
  for (int k = 0; k < 6; ++k) {
    const double lam = eig.lambdas[k], s = std::sin((k + 1) * pi / 2);
    EXPECT_NEAR(c(k, k), 2 * s * s * (1 - std::exp(-2 * lam * h)) / (2 * lam), 1e-12);
  }
}

TEST(EigenCovariance, LinearInterpolationIntegratedExactly) {
  // Z_s = (1 + s) Leb on [0, 1]
  const auto eig = kernels::dirichlet_eigensystem(1, 0.5, 3);
  CatalystPath p;
  p.times = {0.0, 1.0};
  p.states = {ParticleMeasure::uniform_cloud(0.0, 1.0, 1.0, 64), ParticleMeasure::uniform_cloud(0.0, 1.0, 2.0, 64)};
  const double t = 0.25, h = 0.5;
  const auto c = eigen_step_covariance(p, eig, t, h);
  for (int k = 0; k < 3; ++k) {
    const double lam = 2 * eig.lambdas[k];
    const auto r = integrate([&](double s) { return std::exp(-lam * (t + h - s)) * (1 + s); }, t, t + h, {1e-14, 1e-12, 20});
    EXPECT_NEAR(c(k, k), r.value, 1e-12);
  }
}

TEST(EigenPath, ZeroCatalystGivesZeroField) {
  ParticleMeasure empty;
  const auto eig = kernels::dirichlet_eigensystem(1, 0.5, 4);
  const auto times = superprocess::uniform_times(1.0, 0.1);
  const auto f = sample_eigen_path(frozen(empty, times), eig, times, 1);
  EXPECT_EQ(f.coeffs.cwiseAbs().maxCoeff(), 0.0);
}

TEST(EigenPath, LebesgueVarianceBuildUpAndSobolevMean) {
  const auto leb = ParticleMeasure::uniform_cloud(0.0, 1.0, 1.0, 200);
  const auto eig = kernels::dirichlet_eigensystem(1, 0.5, 6);
  const auto times = superprocess::uniform_times(0.3, 0.05);
  const auto path = frozen(leb, times);
  const int n = 3000;
  std::vector<std::vector<double>> a2(6, std::vector<double>(n));
  std::vector<double> norm2(n);
  for (int r = 0; r < n; ++r) {
    const auto f = sample_eigen_path(path, eig, times, 8, r);
    for (int k = 0; k < 6; ++k) a2[k][r] = f.coeffs(times.size() - 1, k) * f.coeffs(times.size() - 1, k);
    const double s = sobolev_norm(f, 0.3, 1.0).value;
    norm2[r] = s * s;
  }
  double expect_norm2 = 0.0;
  for (int k = 0; k < 6; ++k) {
    const double lam = eig.lambdas[k], v = (1 - std::exp(-2 * lam * 0.3)) / (2 * lam);
    const auto r = stats::mean_se(a2[k]);
    EXPECT_LT(std::abs(r.mean - v), 3 * r.se) << k;
    expect_norm2 += v / (1 + lam);
  }
  const auto r = stats::mean_se(norm2);
  EXPECT_LT(std::abs(r.mean - expect_norm2), 3 * r.se);
}

TEST(EigenPath, DoobTypeBound) {
  const auto leb = ParticleMeasure::uniform_cloud(0.0, 1.0, 1.0, 100);
  const auto eig = kernels::dirichlet_eigensystem(1, 0.5, 4);
  const double T = 1.0;
  const auto times = superprocess::uniform_times(T, 0.01);
  const auto path = frozen(leb, times);
  const auto r = mc(300, [&](std::uint64_t i) {
    const auto f = sample_eigen_path(path, eig, times, 21, i);
    return f.coeffs.col(0).cwiseAbs2().maxCoeff();
  });
  EXPECT_LE(r.mean, 16.0 * T * leb.total_mass() / 2.0);
  EXPECT_GT(r.mean, 0.0);
}

TEST(EigenPath, TwoRepresentationsAgree) {
  // Var <phi, X_t> for a frozen atom at u0: eigenmode sum vs image-kernel quadrature
  const GaussianBump phi{1.0, 0.5, 0.08};
  const double kappa = 0.5, t = 0.2, u0 = 0.3;
  const auto eig = kernels::dirichlet_eigensystem(1, kappa, 256);
  const auto c = eigen_step_covariance(frozen(ParticleMeasure::point_mass(u0, 1.0, 1.0), {0.0, t}), eig, 0.0, t);
  Eigen::VectorXd coef(eig.K);
  for (int k = 0; k < eig.K; ++k)
    coef[k] = integrate([&](double x) { return phi(x) * eig.mode(k, x); }, 0.0, 1.0, {1e-13, 1e-11, 20}).value;
  const double via_modes = coef.dot(c * coef);
  auto dirichlet_smooth = [&](double tau, double u) {
    double s = 0.0;
    for (int n = -3; n <= 3; ++n) s += phi.smoothed(tau, u + 2 * n, kappa) - phi.smoothed(tau, -u + 2 * n, kappa);
    return s;
  };
  const double via_kernel =
      integrate([&](double tau) { return std::pow(dirichlet_smooth(tau, u0), 2); }, 0.0, t, {1e-13, 1e-11, 20}).value;
  EXPECT_NEAR(via_modes / via_kernel, 1.0, 0.01);
}

TEST(Sobolev, Values) {
  const auto eig = kernels::dirichlet_eigensystem(1, 0.5, 10);
  std::vector<double> a(10, 0.0);
  EXPECT_EQ(sobolev_norm(a, eig, 1.0).value, 0.0);
  a[0] = 1.0;
  EXPECT_NEAR(sobolev_norm(a, eig, 1.0).value, 0.4104846065998353, 1e-12);
  for (int k = 0; k < 10; ++k) a[k] = 1.0 / (k + 1);
  double prev = kInf;
  for (double n : {0.6, 1.0, 2.0, 3.5}) {
    const double v = sobolev_norm(a, eig, n).value;
    EXPECT_LE(v, prev);
    prev = v;
  }
  EXPECT_THROW(sobolev_norm(a, eig, 0.5), std::invalid_argument);
  EXPECT_GT(sobolev_norm(a, eig, 1.0).tail_factor, 0.0);
  EXPECT_LT(sobolev_norm(a, eig, 1.0).tail_factor, 2.0 / (pi * pi * 0.5 * 10));
}

TEST(Holder, CalibrationInputs) {
  const std::vector<double> lags{1.0 / 1024, 1.0 / 512, 1.0 / 256, 1.0 / 128};
  std::vector<std::vector<double>> lin(4), bm(4);
  for (int l = 0; l < 4; ++l) lin[l].assign(200, lags[l]);  // f(t) = t
  const auto a = holder_estimate(lags, lin, 1);
  EXPECT_NEAR(a.slope, 1.0, 0.01);
  NormalStream z(7, 0);
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 4000; ++i) bm[l].push_back(std::abs(std::sqrt(lags[l]) * z()));
  const auto b = holder_estimate(lags, bm, 2);
  EXPECT_NEAR(b.slope, 0.5, 0.03);
  EXPECT_TRUE(b.ci.contains(0.5));
  std::vector<std::vector<double>> zero(4, std::vector<double>(100, 0.0));
  EXPECT_FALSE(holder_estimate(lags, zero, 3).defined);
  EXPECT_THROW(holder_estimate(std::span(lags).first(3), lin, 1), std::invalid_argument);
}

TEST(PairingVariance, FrozenAtomMatchesQuadrature) {
  const GaussianBump phi{1.3, 0.2, 0.4};
  const double t = 0.7, kappa = 0.5, u0 = -0.1;
  const double v = pairing_variance(frozen(ParticleMeasure::point_mass(u0, 1.0, 1.0), {0.0, 0.3, t}), phi, t, kappa);
  const auto r = integrate([&](double tau) { return std::pow(phi.smoothed(tau, u0, kappa), 2); }, 0.0, t, {1e-14, 1e-12, 20});
  EXPECT_NEAR(v, r.value, 1e-10);
}

TEST(SpectralSampler, FrozenAtomSecondAndFourthMoments) {
  const double t = 0.5, kappa = 0.5;
  const auto times = superprocess::refined_times(t, 0.005, 1.15, 1e-7);
  const auto path = frozen(ParticleMeasure::point_mass(0.0, 1.0, 1.0), times);
  SpectralBox box;
  box.modes = 2048;
  const int n = 6000;
  std::vector<double> m2(n), m4(n);
  for (int i = 0; i < n; ++i) {
    NormalStream z(31, i);
    m2[i] = sample_l2_norm_squared(path, t, kappa, box, z);
    m4[i] = m2[i] * m2[i];
  }
  const double tr = atom_trace(t, kappa), hs = atom_hilbert_schmidt_sq(t, kappa);
  const auto a = stats::mean_se(m2), b = stats::mean_se(m4);
  EXPECT_LT(std::abs(a.mean - tr), 3 * a.se) << a.mean << " vs " << tr;
  EXPECT_LT(std::abs(b.mean - (tr * tr + 2 * hs)), 3 * b.se) << b.mean << " vs " << tr * tr + 2 * hs;
}

TEST(Export, CsvAndMetadata) {
  QuenchedCovariance c;
  c.points = {0.0, 1.0};
  c.gamma = Eigen::MatrixXd::Identity(2, 2);
  std::ostringstream os;
  write_samples_csv(os, sample_quenched_field(c, 3, 1), 0.5);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "replica,time,mode_or_point,value");
  EXPECT_NE(covariance_metadata_json(c).find("\"divergent\": false"), std::string::npos);
}
