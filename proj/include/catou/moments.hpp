#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "catou/kernels.hpp"
#include "catou/stats.hpp"

namespace catou::moments {

enum class Initial { lebesgue, delta0 };

struct AnnealedVariance {
  double value = 0.0;
  bool infinite = false;
  double error = 0.0;
};

// E_B int_0^t p(t - s, x, B_s)^2 ds for a standard Brownian atom B and the
// field kernel (1/2) Delta. Equals 1/4 at x = 0 in d = 1 for every t; +inf in d >= 2.
AnnealedVariance annealed_atom_variance(double t, double x, int d);

// Density of E Z_t(dx). kappa is the catalyst generator constant.
double first_moment_density(double t, double x, Initial initial, double kappa = 1.0);

struct MomentQuery {
  double t1 = 1.0;
  double t2 = 1.0;
  double x1 = 0.0;
  double x2 = 0.0;
  Initial initial = Initial::lebesgue;
  double kappa = 1.0;
  // both points are smoothed with p(smoothing, ., .); 0 gives the density itself
  double smoothing = 0.0;

  void validate() const;
};

struct MomentValue {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

// Second-order coefficient c2 of the Laplace exponent as a density in
// (x1, x2): for t1 <= t2, int_0^{t1} int p(s, 0, y) p(t1 - s, y, x1)
// p(t2 - s, y, x2) dy ds from delta0, int_0^{t1} p(2 s + t2 - t1, x1, x2) ds
// from Lebesgue. The covariance density of Z is 2 c2.
MomentValue second_moment_density(const MomentQuery& q);

// Full density of E[Z_{t1}(dx1) Z_{t2}(dx2)] for the particle system started
// from N particles of mass 1/N at the origin (N = 0 means the superprocess
// limit): (1 - 1/N) m1 m1 + 2 c2 + (1/N) int p(t1,0,y) p(.,y,x1) p(t2-t1+.,y,x2) dy.
MomentValue full_second_moment_density(const MomentQuery& q, double N = 0.0);

// int int c2 over (x1, x2) from delta0, i.e. min(t1, t2).
double integrated_second_moment(double t1, double t2);

struct FourthMoment {
  double value = 0.0;
  double constant = 0.0;     // int p(tau, x, u)^2 dx * sqrt(tau), computed
  double trace_term = 0.0;   // E (tr Gamma)^2
  double hs_term = 0.0;      // 2 E |Gamma|_HS^2
  double finite_n_term = 0.0;  // part of hs_term due to 1/N
  double error = 0.0;
  bool converged = true;
};

struct FourthMomentOptions {
  double kappa_field = 0.5;
  double kappa_catalyst = 1.0;
  double N = 0.0;  // finite particle number, 0 for the superprocess
  double rel_tol = 1e-8;
};

// E int int Z_{s1}(du1) Z_{s2}(du2) p(2t - s1 - s2, u1, u2)^2 (field kernel),
// the integrand of E |Gamma_t|_HS^2. With finite_n_only, just the 1/N part.
double hs_integrand(double s1, double s2, double t, const FourthMomentOptions& opt, bool finite_n_only = false);

// E |X_t|_{L2}^4 for the field started at zero with catalyst Z_0 = delta0,
// d = 1, split as E (tr Gamma_t)^2 + 2 E |Gamma_t|_HS^2.
FourthMoment fourth_moment_l2(double t, const FourthMomentOptions& opt = {});

struct KurtosisCertificate {
  std::size_t n = 0;
  double excess_kurtosis = 0.0;
  stats::Interval ci;
  bool leptokurtic = false;  // ci.lo > 0
};

// Needs at least 10^4 samples.
KurtosisCertificate leptokurtosis_certificate(std::span<const double> samples, std::uint64_t seed,
                                              int resamples = 1000);

// Excess kurtosis of sqrt(V) g, V = v1 with probability p, v2 otherwise.
double variance_mixture_kurtosis(double p, double v1, double v2);

// Fourth Neumann coefficient for mu = delta0 and a Gaussian bump, d = 1.
MomentValue c4_coefficient(double t, const kernels::GaussianBump& phi, double kappa = 1.0);

struct ResultRow {
  std::string check;
  std::string parameters;
  double analytic = 0.0;
  double mc_estimate = 0.0;
  double se = 0.0;
  bool pass = false;
};

// check,parameters,analytic,mc_estimate,se,pass
void write_results_csv(std::ostream& os, std::span<const ResultRow> rows);

}  // namespace catou::moments
