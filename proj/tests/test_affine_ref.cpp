#include "catou/affine_ref.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "catou/stats.hpp"

using namespace catou;
using namespace catou::affine;
using cd = std::complex<double>;

namespace {

AffineModel ou(double x0 = 0.7) { return {Kind::ou, 0.4, 1.3, 0.8, x0}; }
AffineModel cir(double x0 = 0.9) { return {Kind::cir, 0.6, 1.1, 0.7, x0}; }

}  // namespace

TEST(AffineRef, ValidatesParameters) {
  EXPECT_THROW(ou_transform({Kind::ou, 0.0, 0.0, 1.0, 0.0}, 1.0, cd(0, 1)), std::invalid_argument);
  EXPECT_THROW(ou_transform({Kind::ou, 0.0, 1.0, 0.0, 0.0}, 1.0, cd(0, 1)), std::invalid_argument);
  EXPECT_THROW(cir_transform({Kind::cir, 0.0, 1.0, 1.0, -0.1}, 1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(cir_transform(cir(), 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(cir_transform(ou(), 1.0, -0.5), std::invalid_argument);
  EXPECT_THROW(euler_maruyama(ou(), 0.0, 1.0, 10, 1), std::invalid_argument);
}

TEST(AffineRef, TransformAtZeroIsOne) {
  EXPECT_EQ(ou_transform(ou(), 0.8, cd(0, 0)), cd(1, 0));
  EXPECT_DOUBLE_EQ(cir_transform(cir(), 0.8, 0.0), 1.0);
}

TEST(AffineRef, OuStationaryModulus) {
  const auto m = ou();
  const double var = m.sigma * m.sigma / m.beta;
  EXPECT_NEAR(std::abs(ou_transform(m, 60.0, cd(0, 1))), std::exp(-0.5 * var), 1e-14);
}

TEST(AffineRef, CirRiccatiMatchesClosedForm) {
  for (double b : {0.0, 0.6})
    for (double u : {-0.1, -1.0, -5.0})
      for (double t : {0.1, 1.0, 4.0}) {
        AffineModel m = cir();
        m.b = b;
        const auto num = cir_exponents(m, t, u), ex = cir_exponents_exact(m, t, u);
        EXPECT_NEAR(num.psi, ex.psi, 1e-10 * std::abs(u)) << b << ' ' << u << ' ' << t;
        EXPECT_NEAR(num.phi, ex.phi, 1e-10) << b << ' ' << u << ' ' << t;
      }
}

TEST(AffineRef, LogTransformAffineInInitialState) {
  for (double t : {0.3, 1.0, 2.5}) {
    EXPECT_LE(collinearity_residual(ou(), t, cd(0, 0.9)), 1e-10);
    EXPECT_LE(collinearity_residual(cir(), t, cd(-1.5, 0)), 1e-10);
  }
}

TEST(AffineRef, FlowComposition) {
  const double s = 0.35, t = 0.8;
  const auto m = cir();
  const auto full = cir_exponents(m, s + t, -2.0);
  const auto first = cir_exponents(m, t, -2.0);
  const auto second = cir_exponents(m, s, first.psi);
  EXPECT_NEAR(full.psi, second.psi, 1e-10);
  EXPECT_NEAR(full.phi, first.phi + second.phi, 1e-10);

  const auto o = ou();
  const auto of = ou_exponents(o, s + t, cd(0, 1.2));
  const auto o1 = ou_exponents(o, t, cd(0, 1.2));
  const auto o2 = ou_exponents(o, s, o1.psi);
  EXPECT_LE(std::abs(of.psi - o2.psi), 1e-14);
  EXPECT_LE(std::abs(of.phi - (o1.phi + o2.phi)), 1e-14);
}

TEST(AffineRef, NoiseFreeLimitIsRelaxation) {
  AffineModel m = ou(2.0);
  m.sigma = 1e-300;
  const auto x = euler_maruyama(m, 1e-4, 1.0, 3, 5);
  for (double v : x) EXPECT_NEAR(v, mean(m, 1.0), 1e-4);
}

TEST(AffineRef, EulerMaruyamaMeans) {
  for (const auto& m : {ou(), cir()}) {
    const auto x = euler_maruyama(m, 0.01, 1.0, 20000, 11);
    const auto ms = stats::mean_se(x);
    EXPECT_LE(std::abs(stats::z_score(ms.mean, mean(m, 1.0), ms.se)), 3.0);
  }
}

TEST(AffineRef, EulerMaruyamaTransforms) {
  const auto o = ou();
  const auto xo = euler_maruyama(o, 0.01, 1.0, 20000, 12);
  std::vector<double> re, im;
  for (double v : xo) {
    re.push_back(std::cos(0.9 * v));
    im.push_back(std::sin(0.9 * v));
  }
  const auto a = ou_transform(o, 1.0, cd(0, 0.9));
  const auto mr = stats::mean_se(re), mi = stats::mean_se(im);
  EXPECT_LE(std::abs(stats::z_score(mr.mean, a.real(), mr.se)), 3.0);
  EXPECT_LE(std::abs(stats::z_score(mi.mean, a.imag(), mi.se)), 3.0);

  const auto c = cir();
  const auto xc = euler_maruyama(c, 0.005, 1.0, 20000, 13);
  std::vector<double> e;
  for (double v : xc) e.push_back(std::exp(-1.5 * v));
  const auto me = stats::mean_se(e);
  EXPECT_LE(std::abs(stats::z_score(me.mean, cir_transform(c, 1.0, -1.5), me.se)), 3.0);
}

TEST(AffineRef, SerialMatchesParallel) {
  const auto a = euler_maruyama(cir(), 0.01, 0.5, 64, 3, 7, Exec::serial);
  const auto b = euler_maruyama(cir(), 0.01, 0.5, 64, 3, 7, Exec::parallel);
  EXPECT_EQ(a, b);
  for (double v : a) EXPECT_GE(v, 0.0);
}

TEST(AffineRef, CsvExport) {
  std::ostringstream os;
  const TransformRow rows[] = {{1.0, cd(0, 1), cd(0.5, 0.25), cd(0.5, 0.5), 0.125}};
  write_transform_csv(os, rows);
  EXPECT_EQ(os.str(), "t,u_re,u_im,analytic_re,analytic_im,mc_re,mc_im,se\n1,0,1,0.5,0.25,0.5,0.5,0.125\n");
}
