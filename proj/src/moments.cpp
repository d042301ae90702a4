#include "catou/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "catou/quadrature.hpp"

namespace catou::moments {

using kernels::heat_kernel;
using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gauss(double var, double z) { return std::exp(-z * z / (2.0 * var)) / std::sqrt(2.0 * pi * var); }

// int p(a, 0, y) p(b, y, x1) p(c, y, x2) dy, all kernels kappa * Delta
double three_kernel(double a, double b, double c, double x1, double x2, double kappa) {
  const double v = 2.0 * kappa;
  if (b + c <= 0.0) throw std::domain_error("three_kernel: coincident legs need smoothing");
  const double m = (c * x1 + b * x2) / (b + c);
  return gauss(v * (b + c), x1 - x2) * gauss(v * (a + b * c / (b + c)), m);
}

MomentValue from(const QuadResult& r) { return {r.value, r.error, r.converged}; }

}  // namespace

AnnealedVariance annealed_atom_variance(double t, double x, int d) {
  if (!(t > 0.0)) throw std::invalid_argument("annealed_atom_variance: t must be positive");
  if (d < 1) throw std::invalid_argument("annealed_atom_variance: d must be >= 1");
  AnnealedVariance r;
  if (d >= 2) {
    r.value = kInf;
    r.infinite = true;
    return r;
  }
  if (x == 0.0) {
    r.value = 0.25;
    return r;
  }
  // s = t sin(theta) removes the endpoint singularity of ((t - s)(t + s))^{-1/2}
  const auto q = integrate(
      [&](double th) { return std::exp(-x * x / (t * (1.0 + std::sin(th)))) / (2.0 * pi); }, 0.0, pi / 2,
      {1e-14, 1e-12, 20});
  r.value = q.value;
  r.error = q.error;
  return r;
}

double first_moment_density(double t, double x, Initial initial, double kappa) {
  if (!(t > 0.0)) throw std::invalid_argument("first_moment_density: t must be positive");
  return initial == Initial::lebesgue ? 1.0 : heat_kernel(t, 0.0, x, kappa);
}

void MomentQuery::validate() const {
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw std::invalid_argument("MomentQuery: times must be positive");
  if (!(kappa > 0.0)) throw std::invalid_argument("MomentQuery: kappa must be positive");
  if (!(smoothing >= 0.0)) throw std::invalid_argument("MomentQuery: negative smoothing");
}

MomentValue second_moment_density(const MomentQuery& query) {
  query.validate();
  MomentQuery q = query;
  if (q.t1 > q.t2) {
    std::swap(q.t1, q.t2);
    std::swap(q.x1, q.x2);
  }
  const double h = q.smoothing, k = q.kappa, lag = q.t2 - q.t1;
  const QuadOptions opt{1e-13, 1e-9, 20};  // three_kernel roundoff floors the estimate near 1e-10 relative
  if (q.initial == Initial::lebesgue) {
    return from(integrate_singular(
        [&](double s) { return heat_kernel(2.0 * s + lag + 2.0 * h, q.x1, q.x2, k); }, 0.0, q.t1, opt));
  }
  return from(integrate_singular(
      [&](double s) { return three_kernel(s, q.t1 - s + h, q.t2 - s + h, q.x1, q.x2, k); }, 0.0, q.t1, opt));
}

MomentValue full_second_moment_density(const MomentQuery& query, double N) {
  query.validate();
  if (N < 0.0 || (N > 0.0 && N < 1.0)) throw std::invalid_argument("full_second_moment_density: N must be 0 or >= 1");
  if (N > 0.0 && query.initial != Initial::delta0)
    throw std::invalid_argument("full_second_moment_density: finite N needs the delta0 start");
  MomentQuery q = query;
  if (q.t1 > q.t2) {
    std::swap(q.t1, q.t2);
    std::swap(q.x1, q.x2);
  }
  const double h = q.smoothing;
  auto m1 = [&](double t, double x) {
    return q.initial == Initial::lebesgue ? 1.0 : heat_kernel(t + h, 0.0, x, q.kappa);
  };
  auto c2 = second_moment_density(q);
  MomentValue r;
  const double inv_n = N > 0.0 ? 1.0 / N : 0.0;
  r.value = (1.0 - inv_n) * m1(q.t1, q.x1) * m1(q.t2, q.x2) + 2.0 * c2.value;
  if (inv_n > 0.0) r.value += inv_n * three_kernel(q.t1, h, q.t2 - q.t1 + h, q.x1, q.x2, q.kappa);
  r.error = 2.0 * c2.error;
  r.converged = c2.converged;
  return r;
}

double integrated_second_moment(double t1, double t2) {
  if (t1 < 0.0 || t2 < 0.0) throw std::invalid_argument("integrated_second_moment: negative time");
  return std::min(t1, t2);
}

double hs_integrand(double s1, double s2, double t, const FourthMomentOptions& opt, bool finite_n_only) {
  const double kx = opt.kappa_field, kz = opt.kappa_catalyst;
  const double sigma = 2.0 * t - s1 - s2;
  if (!(sigma > 0.0)) throw std::domain_error("hs_integrand: need s1 + s2 < 2t");
  const double pre = 1.0 / std::sqrt(8.0 * pi * kx * sigma);
  const double spread = 1.0 / std::sqrt(2.0 * pi * (2.0 * kz * (s1 + s2) + kx * sigma));
  const double lo = 2.0 * kz * std::abs(s2 - s1) + kx * sigma;
  const double inv_n = opt.N > 0.0 ? 1.0 / opt.N : 0.0;
  const double finite = inv_n * (1.0 / std::sqrt(2.0 * pi * lo) - spread);
  if (finite_n_only) return pre * finite;
  // mean product + twice the c2 part
  const double cov = (1.0 / kz) / std::sqrt(2.0 * pi) * (std::sqrt(lo + 4.0 * kz * std::min(s1, s2)) - std::sqrt(lo));
  return pre * (spread + cov);
}

FourthMoment fourth_moment_l2(double t, const FourthMomentOptions& opt) {
  if (t < 0.0) throw std::invalid_argument("fourth_moment_l2: negative time");
  if (!(opt.kappa_field > 0.0) || !(opt.kappa_catalyst > 0.0))
    throw std::invalid_argument("fourth_moment_l2: kappas must be positive");
  FourthMoment r;
  r.constant = integrate([&](double x) { return std::pow(heat_kernel(1.0, x, 0.0, opt.kappa_field), 2); }, -kInf, kInf,
                         {1e-15, 1e-13, 20})
                   .value;
  if (t == 0.0) return r;
  const double c = r.constant * r.constant;
  const double a = std::sqrt(t);
  const QuadOptions inner{1e-15, opt.rel_tol, 20}, outer{1e-14, opt.rel_tol, 20};
  double err = 0.0;
  bool ok = true;

  // s_i = t - v_i^2 turns (t - s)^{-1/2} ds into 2 dv; symmetric, so twice the v2 < v1 half
  auto trace = integrate(
      [&](double v1) {
        const auto in = integrate([&](double) { return 4.0 * (1.0 + 2.0 * (t - v1 * v1)); }, 0.0, v1, inner);
        return 2.0 * in.value;
      },
      0.0, a, outer);
  r.trace_term = c * trace.value;
  err += c * trace.error;
  ok = ok && trace.converged;

  const double inv_n = opt.N > 0.0 ? 1.0 / opt.N : 0.0;
  auto integrand = [&](double v1, double v2, bool finite_part) {
    if (v1 == 0.0 && v2 == 0.0) return 0.0;
    return 4.0 * v1 * v2 * hs_integrand(t - v1 * v1, t - v2 * v2, t, opt, finite_part);
  };
  auto double_integral = [&](bool finite_part) {
    return integrate(
        [&](double v1) {
          const auto in = integrate([&](double v2) { return integrand(v1, v2, finite_part); }, 0.0, v1, inner);
          ok = ok && in.converged;
          return 2.0 * in.value;
        },
        0.0, a, outer);
  };
  const auto hs = double_integral(false);
  r.hs_term = 2.0 * hs.value;
  err += 2.0 * hs.error;
  ok = ok && hs.converged;
  if (inv_n > 0.0) {
    const auto fin = double_integral(true);
    r.finite_n_term = 2.0 * fin.value;
    r.hs_term += r.finite_n_term;
    err += 2.0 * fin.error;
    ok = ok && fin.converged;
  }
  r.value = r.trace_term + r.hs_term;
  r.error = err;
  r.converged = ok;
  return r;
}

KurtosisCertificate leptokurtosis_certificate(std::span<const double> samples, std::uint64_t seed, int resamples) {
  if (samples.size() < 10000) throw std::invalid_argument("leptokurtosis_certificate: need at least 10^4 samples");
  KurtosisCertificate r;
  r.n = samples.size();
  r.excess_kurtosis = stats::k_statistics(samples).excess_kurtosis();
  r.ci = stats::kurtosis_bootstrap(samples, seed, resamples);
  r.leptokurtic = r.ci.lo > 0.0;
  return r;
}

double variance_mixture_kurtosis(double p, double v1, double v2) {
  if (!(p >= 0.0 && p <= 1.0) || v1 < 0.0 || v2 < 0.0) throw std::invalid_argument("variance_mixture_kurtosis");
  const double m = p * v1 + (1 - p) * v2, m2 = p * v1 * v1 + (1 - p) * v2 * v2;
  if (m == 0.0) throw std::invalid_argument("variance_mixture_kurtosis: zero variance");
  return 3.0 * (m2 - m * m) / (m * m);
}

MomentValue c4_coefficient(double t, const kernels::GaussianBump& phi, double kappa) {
  if (!(t > 0.0) || !(kappa > 0.0)) throw std::invalid_argument("c4_coefficient: need t > 0, kappa > 0");
  const double a2w2 = phi.amplitude * phi.amplitude * phi.width * phi.width;
  const QuadOptions opt{1e-14, 1e-7, 15};
  bool ok = true;
  // inner bracket: int_0^s int p(s - s1, w, y) (T_s phi)(y)^2 dy ds1
  auto bracket = [&](double s, double w) {
    const double v = phi.width * phi.width + 2.0 * kappa * s;
    const auto r = integrate(
        [&](double lag) {
          return a2w2 * std::sqrt(pi / v) * gauss(0.5 * v + 2.0 * kappa * lag, w - phi.center);
        },
        0.0, s, opt);
    ok = ok && r.converged;
    return r.value;
  };
  const auto outer = integrate(
      [&](double s) {
        const double sd = std::sqrt(2.0 * kappa * (t - s));
        const auto r = integrate(
            [&](double z) {
              const double b = bracket(s, sd * z);
              return gauss(1.0, z) * b * b;
            },
            -10.0, 10.0, opt);
        ok = ok && r.converged;
        return r.value;
      },
      0.0, t, opt);
  return {outer.value, outer.error, ok && outer.converged};
}

void write_results_csv(std::ostream& os, std::span<const ResultRow> rows) {
  os << "check,parameters,analytic,mc_estimate,se,pass\n";
  os.precision(17);
  for (const auto& r : rows)
    os << r.check << ",\"" << r.parameters << "\"," << r.analytic << ',' << r.mc_estimate << ',' << r.se << ','
       << (r.pass ? "true" : "false") << '\n';
}

}  // namespace catou::moments
