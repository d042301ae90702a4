#include <algorithm>
#include <array>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "catou/affine_ref.hpp"
#include "catou/dual_pde.hpp"
#include "catou/gaussian_field.hpp"
#include "catou/harness.hpp"
#include "catou/kernels.hpp"
#include "catou/moments.hpp"
#include "catou/parallel.hpp"
#include "catou/quadrature.hpp"
#include "catou/rng.hpp"
#include "catou/superprocess.hpp"

namespace catou::harness::detail {

namespace {

using superprocess::CatalystPath;
using superprocess::ParticleMeasure;
using std::numbers::pi;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---- parameter access -------------------------------------------------------

[[noreturn]] void bad(const CheckContext& c, const std::string& key, const std::string& what) {
  throw ConfigError(c.name + ": parameter '" + key + "' " + what);
}

double num(const CheckContext& c, const char* key, double lo, double hi) {
  const auto& v = c.params.at(key);
  if (!v.is_number()) bad(c, key, "must be a number");
  const double x = v.get<double>();
  if (!(x >= lo && x <= hi)) bad(c, key, fmt("must lie in [%g, %g]", lo, hi));
  return x;
}

std::size_t count(const CheckContext& c, const char* key, std::size_t lo, std::size_t hi) {
  const auto& v = c.params.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) bad(c, key, "must be a non-negative integer");
  const auto x = v.get<std::size_t>();
  if (x < lo || x > hi) bad(c, key, fmt("must lie in [%zu, %zu]", lo, hi));
  return x;
}

std::vector<double> nums(const CheckContext& c, const char* key, double lo, double hi, std::size_t min_size) {
  const auto& v = c.params.at(key);
  if (!v.is_array() || v.size() < min_size) bad(c, key, fmt("must be an array of at least %zu numbers", min_size));
  std::vector<double> r;
  for (const auto& e : v) {
    if (!e.is_number()) bad(c, key, "must contain numbers only");
    const double x = e.get<double>();
    if (!(x >= lo && x <= hi)) bad(c, key, fmt("entries must lie in [%g, %g]", lo, hi));
    r.push_back(x);
  }
  return r;
}

std::vector<std::array<double, 2>> pairs(const CheckContext& c, const char* key, double lo, double hi) {
  const auto& v = c.params.at(key);
  if (!v.is_array() || v.empty()) bad(c, key, "must be a non-empty array of pairs");
  std::vector<std::array<double, 2>> r;
  for (const auto& e : v) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) bad(c, key, "entries must be [a, b]");
    const double a = e[0].get<double>(), b = e[1].get<double>();
    if (!(a >= lo && a <= hi && b >= lo && b <= hi)) bad(c, key, fmt("entries must lie in [%g, %g]", lo, hi));
    r.push_back({a, b});
  }
  return r;
}

std::size_t replicas(const CheckContext& c, std::size_t min) {
  const auto n = count(c, "replicas", min, std::numeric_limits<std::size_t>::max());
  if (n > c.cfg.caps.max_replicas)
    throw ResourceCapError(fmt("%zu replicas requested, cap is %zu", n, c.cfg.caps.max_replicas));
  return n;
}

superprocess::SbmOptions sbm_options(const CheckContext& c) {
  superprocess::SbmOptions o;
  o.population_cap = c.cfg.caps.max_population;
  return o;
}

std::vector<double> record_grid(std::vector<double> times) {
  times.push_back(0.0);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

std::size_t index_of(const std::vector<double>& grid, double t) {
  return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());
}

// k values per replica, evaluated in parallel, stored replica-major
struct Samples {
  std::size_t n = 0, k = 0;
  std::vector<double> data;

  std::vector<double> column(std::size_t j) const {
    std::vector<double> c(n);
    for (std::size_t r = 0; r < n; ++r) c[r] = data[r * k + j];
    return c;
  }
};

template <class F>
Samples per_replica(std::size_t n, std::size_t k, F&& f) {
  Samples s{n, k, std::vector<double>(n * k)};
  for_each_index(n, [&](std::size_t r) { f(r, std::span<double>(s.data.data() + r * k, k)); });
  return s;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

// Z smoothed with p(h, ., x) under the catalyst kernel
double smoothed_density(const ParticleMeasure& z, double x, double h, double kappa) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.count(); ++i) s += kernels::heat_kernel(h, z.at(i)[0], x, kappa);
  return z.mass_per_particle * s;
}

// ---- checks -------------------------------------------------------------------

void atom_variance_quarter(const CheckContext& c, CheckResult& out) {
  const auto n = replicas(c, 2);
  const double t = num(c, "t", 1e-3, 100.0), x = num(c, "x", -10.0, 10.0);
  const double dt = num(c, "dt", 1e-5, t), ratio = num(c, "ratio", 1.01, 4.0), tau_min = num(c, "tau_min", 1e-12, dt);
  const double abs_tol = num(c, "abs_tol", 0.0, 1.0);
  const auto times = superprocess::refined_times(t, dt, ratio, tau_min);
  const double pt[1] = {x};
  const auto s = per_replica(n, 1, [&](std::size_t r, std::span<double> o) {
    const auto path = superprocess::simulate_atom_catalyst(times, 1, c.cfg.seed, stream_id(c.tag, r));
    o[0] = field::quenched_covariance(path, pt, t, 0.5, Exec::serial).gamma(0, 0);
  });
  const auto v = s.column(0);
  const double exact = moments::annealed_atom_variance(t, x, 1).value;
  const auto ms = stats::mean_se(v);
  const auto p = fmt("d=1, t=%g, x=%g, paths=%zu", t, x, n);
  out.rows.push_back(statistical_row("annealed variance", p, exact, ms));
  out.rows.push_back(tolerance_row("annealed variance, absolute error", p, exact, ms.mean, abs_tol));
  out.data["time_grid_points"] = times.size();
  out.data["d2_infinite"] = moments::annealed_atom_variance(t, x, 2).infinite;
  out.notes.push_back("each path integrates p(t - s, x, B_s)^2 exactly over frozen intervals of a grid refined towards t");
}

void sbm_mass_martingale(const CheckContext& c, CheckResult& out) {
  const auto n = replicas(c, 2);
  const double N = num(c, "N", 1.0, 1e5), kappa = num(c, "kappa", 1e-3, 1e3);
  const auto grid = record_grid(nums(c, "times", 1e-6, 100.0, 1));
  const HeatKernelParams hp{kappa, 1, 2.0};
  const auto init = ParticleMeasure::point_mass(0.0, 1.0, N);
  const auto opt = sbm_options(c);
  const auto s = per_replica(n, grid.size(), [&](std::size_t r, std::span<double> o) {
    const auto path = superprocess::simulate_sbm(init, N, grid, hp, c.cfg.seed, stream_id(c.tag, r), opt);
    for (std::size_t i = 0; i < grid.size(); ++i) o[i] = path.states[i].total_mass();
  });
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const auto m = s.column(i);
    std::vector<double> sq(m.size());
    for (std::size_t r = 0; r < m.size(); ++r) sq[r] = (m[r] - 1.0) * (m[r] - 1.0);
    const auto p = fmt("N=%g, t=%g, replicas=%zu", N, grid[i], n);
    out.rows.push_back(statistical_row("E <1, Z_t>", p, 1.0, stats::mean_se(m)));
    out.rows.push_back(statistical_row("E (<1, Z_t> - 1)^2", p, 2.0 * grid[i], stats::mean_se(sq)));
  }
}

void sbm_total_mass_laplace(const CheckContext& c, CheckResult& out) {
  const auto n = replicas(c, 2);
  const double N = num(c, "N", 1.0, 1e7);
  const auto lambdas = nums(c, "lambdas", 0.0, 100.0, 1);
  const auto grid = record_grid(nums(c, "times", 1e-6, 100.0, 1));
  const auto s = per_replica(n, grid.size(), [&](std::size_t r, std::span<double> o) {
    const auto m = superprocess::simulate_mass(1.0, N, grid, c.cfg.seed, stream_id(c.tag, r), c.cfg.caps.max_population);
    std::copy(m.begin(), m.end(), o.begin());
  });
  plot::Series exact{"exp(-lambda/(1+lambda t))", {}, {}}, mc{"Monte Carlo", {}, {}, false};
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double t = grid[i];
    const auto m = s.column(i);
    for (double lam : lambdas) {
      std::vector<double> e(m.size());
      for (std::size_t r = 0; r < m.size(); ++r) e[r] = std::exp(-lam * m[r]);
      const double a = std::exp(-lam / (1.0 + lam * t));
      const auto ms = stats::mean_se(e);
      out.rows.push_back(statistical_row("E exp(-lambda <1, Z_t>)", fmt("lambda=%g, t=%g, N=%g", lam, t, N), a, ms));
      if (i + 1 == grid.size()) {
        exact.x.push_back(lam), exact.y.push_back(a);
        mc.x.push_back(lam), mc.y.push_back(ms.mean);
      }
    }
    std::vector<double> sq(m.size());
    for (std::size_t r = 0; r < m.size(); ++r) sq[r] = (m[r] - 1.0) * (m[r] - 1.0);
    out.rows.push_back(statistical_row("Var <1, Z_t>", fmt("t=%g, N=%g", t, N), 2.0 * t, stats::mean_se(sq)));
  }
  out.series = {exact, mc};
  out.plot.title = fmt("total-mass Laplace transform at t=%g", grid.back());
  out.plot.xlabel = "lambda";
  out.plot.ylabel = "E exp(-lambda <1, Z_t>)";
  out.notes.push_back("total mass simulated by exact transitions of the N-particle birth-death chain");
}

void first_moment(const CheckContext& c, CheckResult& out) {
  const auto n = replicas(c, 2);
  const double N = num(c, "N", 1.0, 1e5), t = num(c, "t", 1e-3, 10.0), h = num(c, "smoothing", 1e-6, 1.0);
  const double kappa = num(c, "kappa", 1e-3, 1e3);
  const auto points = nums(c, "points", -20.0, 20.0, 1);
  const HeatKernelParams hp{kappa, 1, 2.0};
  const auto init = ParticleMeasure::point_mass(0.0, 1.0, N);
  const std::vector<double> grid{0.0, t};
  const auto opt = sbm_options(c);
  const auto s = per_replica(n, points.size(), [&](std::size_t r, std::span<double> o) {
    const auto path = superprocess::simulate_sbm(init, N, grid, hp, c.cfg.seed, stream_id(c.tag, r), opt);
    for (std::size_t j = 0; j < points.size(); ++j) o[j] = smoothed_density(path.states[1], points[j], h, kappa);
  });
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double a = moments::first_moment_density(t + h, points[j], moments::Initial::delta0, kappa);
    out.rows.push_back(statistical_row("smoothed first moment density",
                                       fmt("t=%g, x=%g, h=%g, N=%g", t, points[j], h, N), a,
                                       stats::mean_se(s.column(j))));
  }
}

void second_moment(const CheckContext& c, CheckResult& out) {
  const auto n = replicas(c, 2);
  const double N = num(c, "N", 1.0, 1e5), h = num(c, "smoothing", 1e-6, 1.0), kappa = num(c, "kappa", 1e-3, 1e3);
  const auto tp = pairs(c, "time_pairs", 1e-3, 10.0);
  const auto xp = pairs(c, "point_pairs", -20.0, 20.0);
  const double leb_tol = num(c, "lebesgue_tol", 0.0, 1.0);
  std::vector<double> ts;
  for (const auto& p : tp) ts.insert(ts.end(), {p[0], p[1]});
  const auto grid = record_grid(ts);
  const HeatKernelParams hp{kappa, 1, 2.0};
  const auto init = ParticleMeasure::point_mass(0.0, 1.0, N);
  const auto opt = sbm_options(c);
  const std::size_t k = tp.size() * xp.size();
  const auto s = per_replica(n, k, [&](std::size_t r, std::span<double> o) {
    const auto path = superprocess::simulate_sbm(init, N, grid, hp, c.cfg.seed, stream_id(c.tag, r), opt);
    std::size_t j = 0;
    for (const auto& tt : tp)
      for (const auto& xx : xp) {
        const auto& z1 = path.states[index_of(grid, tt[0])];
        const auto& z2 = path.states[index_of(grid, tt[1])];
        o[j++] = smoothed_density(z1, xx[0], h, kappa) * smoothed_density(z2, xx[1], h, kappa);
      }
  });
  std::size_t j = 0;
  json limit = json::array();
  for (const auto& tt : tp)
    for (const auto& xx : xp) {
      moments::MomentQuery q{tt[0], tt[1], xx[0], xx[1], moments::Initial::delta0, kappa, h};
      const auto a = moments::full_second_moment_density(q, N);
      if (!a.converged) out.notes.push_back("quadrature did not converge for " + fmt("t=(%g,%g)", tt[0], tt[1]));
      out.rows.push_back(statistical_row("smoothed second moment density",
                                         fmt("t1=%g, t2=%g, x1=%g, x2=%g, h=%g, N=%g", tt[0], tt[1], xx[0], xx[1], h, N),
                                         a.value, stats::mean_se(s.column(j++))));
      limit.push_back(moments::full_second_moment_density(q, 0.0).value);
    }
  out.data["superprocess_limit_values"] = limit;
  const auto leb = moments::second_moment_density({1.0, 1.0, 0.0, 0.0, moments::Initial::lebesgue, 1.0, 0.0});
  out.rows.push_back(tolerance_row("Lebesgue second-order density at the diagonal", "t1=t2=1, x1=x2=0, kappa=1",
                                   1.0 / std::sqrt(2.0 * pi), leb.value, leb_tol));
  out.notes.push_back("analytic values include the exact 1/N terms of the particle system");
}

void occupation_laplace(const CheckContext& c, CheckResult& out) {
  const auto n = replicas(c, 2);
  const double N = num(c, "N", 1.0, 1e4), t = num(c, "t", 1e-3, 10.0), dual_dt = num(c, "dual_dt", 1e-5, 0.1);
  const double psi_a = num(c, "psi_a", 0.0, 50.0), phi_a = num(c, "phi_a", 0.0, 50.0);
  const double psi_b = num(c, "psi_b", 0.0, 50.0), phi_b = num(c, "phi_b", 0.0, 50.0);
  const auto pieces = nums(c, "pieces", 1.0, 4096.0, 2);
  const double min_ratio = num(c, "min_ratio", 1.0, 100.0);
  const auto opt = sbm_options(c);
  const double half = 0.5 * t;
  const double breaks_a[] = {0.0}, values_a[] = {phi_a};
  const double breaks_b[] = {0.0, half}, values_b[] = {phi_b, 0.0};
  const auto s = per_replica(n, 2, [&](std::size_t r, std::span<double> o) {
    const auto m = superprocess::simulate_mass_trajectory(1.0, N, t, c.cfg.seed, stream_id(c.tag, r),
                                                          opt.population_cap);
    const double mt = m.mass_at(t);
    o[0] = std::exp(-psi_a * mt - m.weighted_occupation(breaks_a, values_a));
    o[1] = std::exp(-psi_b * mt - m.weighted_occupation(breaks_b, values_b));
  });
  const kernels::PeriodicGrid g{1, 16, -1.0, 2.0};
  const dual::InitialMeasure mu = ParticleMeasure::point_mass(0.0, 1.0, 1.0);
  auto constant = [](double v) {
    return [v](double, std::span<double> o) { std::fill(o.begin(), o.end(), v); };
  };
  const double a = dual::laplace_functional(mu, kernels::GridFunction::constant(g, psi_a), constant(phi_a), t, dual_dt);
  dual::Forcing step = [half, phi_b](double s, std::span<double> o) {
    std::fill(o.begin(), o.end(), s < half ? phi_b : 0.0);
  };
  const double b = dual::laplace_functional(mu, kernels::GridFunction::constant(g, psi_b), step, t, dual_dt);
  // exact value for N particles of mass 1/N: v' = -v^2 + Phi(t - r)(1 - v/N), value (1 - v/N)^N
  auto finite_n = [&](double psi, double phi, double off_until) {
    namespace ode = boost::numeric::odeint;
    std::array<double, 1> v{N * -std::expm1(-psi / N)};
    auto run = [&](double f, double r0, double r1) {
      if (r1 <= r0) return;
      auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<std::array<double, 1>>());
      ode::integrate_adaptive(
          stepper, [&](const std::array<double, 1>& y, std::array<double, 1>& dy, double) { dy[0] = -y[0] * y[0] + f * (1.0 - y[0] / N); },
          v, r0, r1, 1e-3);
    };
    run(0.0, 0.0, off_until);
    run(phi, off_until, t);
    return std::pow(1.0 - v[0] / N, N);
  };
  const double fa = finite_n(psi_a, phi_a, 0.0), fb = finite_n(psi_b, phi_b, t - half);
  dual::LaplaceOptions lo;
  lo.particles = N;
  const dual::InitialMeasure mu_n = ParticleMeasure::point_mass(0.0, 1.0, N);
  const double la = dual::laplace_functional(mu_n, kernels::GridFunction::constant(g, psi_a), constant(phi_a), t, dual_dt, lo);
  const double lb = dual::laplace_functional(mu_n, kernels::GridFunction::constant(g, psi_b), step, t, dual_dt, lo);
  out.rows.push_back(tolerance_row("N-particle dual vs generating-function ODE", fmt("N=%g, both pairs", N), 0.0,
                                   std::max(std::abs(la - fa), std::abs(lb - fb)), 1e-9));
  out.data["finite_n_values"] = {fa, fb};
  out.data["superprocess_values"] = {a, b};
  out.notes.push_back("rows compare with the superprocess dual; the exact N-particle values are in data");
  out.rows.push_back(statistical_row("constant (psi, Phi)", fmt("psi=%g, Phi=%g, t=%g, N=%g", psi_a, phi_a, t, N), a,
                                     stats::mean_se(s.column(0))));
  out.rows.push_back(statistical_row("step Phi", fmt("psi=%g, Phi=%g on [0,%g), 0 after, t=%g, N=%g", psi_b, phi_b,
                                                     half, t, N),
                                     b, stats::mean_se(s.column(1))));

  // step-function approximation of a smooth time-dependent forcing
  const kernels::PeriodicGrid sg{1, 256, -8.0, 16.0};
  const auto psi = kernels::GridFunction::sample(sg, kernels::GaussianBump{1.5, 0.0, 0.6});
  const kernels::GaussianBump shape{1.0, 0.5, 0.8};
  dual::Forcing smooth = [sg, shape](double s, std::span<double> o) {
    for (int i = 0; i < sg.n; ++i) o[i] = (1.0 + std::sin(3.0 * s)) * shape(sg.coord(i));
  };
  const double ref = dual::laplace_exponent(mu, psi, smooth, t, dual_dt);
  plot::Series err{"|exponent(step) - exponent(smooth)|", {}, {}};
  for (double p : pieces) {
    const double e = std::abs(dual::laplace_exponent(mu, psi, dual::step_function(smooth, 0.0, t, static_cast<int>(p)),
                                                     t, dual_dt) -
                              ref);
    err.x.push_back(p);
    err.y.push_back(e);
  }
  for (std::size_t i = 1; i < err.x.size(); ++i)
    out.rows.push_back(bound_row("step-function error ratio", fmt("pieces %g -> %g", err.x[i - 1], err.x[i]),
                                 err.y[i - 1] / err.y[i], min_ratio, kInf));
  out.data["step_errors"] = err.y;
  out.series = {err};
  out.plot.title = "step-function forcing convergence";
  out.plot.xlabel = "pieces";
  out.plot.ylabel = "exponent error";
  out.plot.loglog = true;
  out.plot.fit_slope_of = 0;
}

void char_laplace(const CheckContext& c, CheckResult& out) {
  const auto n = replicas(c, 2);
  const double N = num(c, "N", 1.0, 1e4), t = num(c, "t", 1e-3, 10.0), dt = num(c, "dt", 1e-4, t);
  const kernels::GaussianBump bump{num(c, "amplitude", -100.0, 100.0), num(c, "center", -10.0, 10.0),
                                   num(c, "width", 1e-2, 10.0)};
  const auto lambdas = nums(c, "lambdas", 0.0, 100.0, 1);
  const double dual_dt = num(c, "dual_dt", 1e-5, 0.1);
  const int grid_n = static_cast<int>(count(c, "grid_n", 16, 1 << 16));
  const auto times = superprocess::uniform_times(t, dt);
  const HeatKernelParams hp{1.0, 1, 2.0};
  const auto init = ParticleMeasure::point_mass(0.0, 1.0, N);
  const auto opt = sbm_options(c);
  const auto s = per_replica(n, lambdas.size() + 1, [&](std::size_t r, std::span<double> o) {
    const auto path = superprocess::simulate_sbm(init, N, times, hp, c.cfg.seed, stream_id(c.tag, r), opt);
    const double v = field::pairing_variance(path, bump, t, 0.5);
    field::NormalStream z(c.cfg.seed, stream_id(c.tag | 1u, r));
    const double y = std::sqrt(v) * z(), m = path.states.back().total_mass();
    for (std::size_t j = 0; j < lambdas.size(); ++j) o[j] = std::cos(y) * std::exp(-lambdas[j] * m);
    o[lambdas.size()] = v;
  });
  const auto g = kernels::PeriodicGrid::padded(bump.center - 6.0 * bump.width, bump.center + 6.0 * bump.width, 1.0, t,
                                               grid_n);
  const auto phi = kernels::GridFunction::sample(g, bump);
  const dual::InitialMeasure mu = ParticleMeasure::point_mass(0.0, 1.0, 1.0);
  const dual::InitialMeasure mu_n = init;
  dual::CharLaplaceOptions fin;
  fin.dual.particles = N;
  json finite_n = json::array(), limit = json::array();
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    const auto lam = kernels::GridFunction::constant(g, lambdas[j]);
    const double a = dual::char_laplace_functional(mu, phi, lam, t, dual_dt);
    limit.push_back(a);
    finite_n.push_back(dual::char_laplace_functional(mu_n, phi, lam, t, dual_dt, fin));
    out.rows.push_back(statistical_row("E cos<phi, X_t> exp(-lambda <1, Z_t>)",
                                       fmt("lambda=%g, t=%g, bump=(%g, %g, %g), N=%g", lambdas[j], t, bump.amplitude,
                                           bump.center, bump.width, N),
                                       a, stats::mean_se(s.column(j))));
  }
  out.data["mean_quenched_variance"] = stats::mean_se(s.column(lambdas.size())).mean;
  out.data["superprocess_values"] = limit;
  out.data["finite_n_values"] = finite_n;
  out.notes.push_back("<phi, X_t> is drawn from its exact quenched Gaussian law given each catalyst path");
  out.notes.push_back("rows compare with the superprocess dual; the exact N-particle values are in data");
}

void fourth_moment_growth(const CheckContext& c, CheckResult& out) {
  const auto n = replicas(c, 2);
  const double N = num(c, "N", 1.0, 1e4), t = num(c, "t", 1e-3, 10.0), dt = num(c, "dt", 1e-4, t);
  const double ratio = num(c, "ratio", 1.01, 4.0), tau_min = num(c, "tau_min", 1e-12, dt);
  field::SpectralBox box;
  box.length = num(c, "box_length", 1.0, 1e3);
  box.modes = static_cast<int>(count(c, "modes", 16, 1 << 16));
  const auto slope_times = nums(c, "slope_times", 1e-3, 100.0, 2);
  const double slope_max = num(c, "slope_max", 0.0, 10.0);
  const auto times = superprocess::refined_times(t, dt, ratio, tau_min);
  const HeatKernelParams hp{1.0, 1, 2.0};
  const auto init = ParticleMeasure::point_mass(0.0, 1.0, N);
  const auto opt = sbm_options(c);
  const auto s = per_replica(n, 2, [&](std::size_t r, std::span<double> o) {
    const auto path = superprocess::simulate_sbm(init, N, times, hp, c.cfg.seed, stream_id(c.tag, r), opt);
    field::NormalStream z(c.cfg.seed, stream_id(c.tag | 1u, r));
    const double x2 = field::sample_l2_norm_squared(path, t, 0.5, box, z);
    o[0] = x2;
    o[1] = x2 * x2;
  });
  moments::FourthMomentOptions fo;
  fo.N = N;
  const auto finite = moments::fourth_moment_l2(t, fo);
  const auto limit = moments::fourth_moment_l2(t);
  const auto p = fmt("t=%g, N=%g, modes=%d, L=%g", t, N, box.modes, box.length);
  out.rows.push_back(statistical_row("E |X_t|^2", p, field::atom_trace(t, 0.5), stats::mean_se(s.column(0))));
  const auto m4 = stats::mean_se(s.column(1));
  out.rows.push_back(statistical_row("E |X_t|^4", p, finite.value, m4));
  out.data["fourth_moment_superprocess_limit"] = limit.value;
  out.data["fourth_moment_finite_n_term"] = finite.finite_n_term;
  out.data["kernel_constant"] = finite.constant;

  plot::Series curve{"E |X_t|^4 (quadrature)", {}, {}}, mc{"Monte Carlo", {t}, {m4.mean}, false};
  double worst = -kInf;
  for (std::size_t i = 0; i < slope_times.size(); ++i) {
    const double v = moments::fourth_moment_l2(slope_times[i]).value;
    curve.x.push_back(slope_times[i]);
    curve.y.push_back(v);
    if (i > 0) {
      const double prev = curve.y[i - 1] / (curve.x[i - 1] * curve.x[i - 1]);
      worst = std::max(worst, v / (slope_times[i] * slope_times[i]) / prev - 1.0);
    }
  }
  const double slope = plot::loglog_slope(curve);
  out.rows.push_back(bound_row("log-log slope of E |X_t|^4", "superprocess limit", slope, -kInf, slope_max));
  out.rows.push_back(bound_row("relative increase of E |X_t|^4 / t^2 between successive t", "superprocess limit", worst,
                               -kInf, 1e-12));
  out.data["slope_values"] = curve.y;
  out.series = {curve, mc};
  out.plot.title = "fourth moment of the L2 norm";
  out.plot.xlabel = "t";
  out.plot.ylabel = "E |X_t|^4";
  out.plot.loglog = true;
  out.plot.fit_slope_of = 0;
  out.notes.push_back("the Monte Carlo row is compared with the exact finite-N value; the N = infinity value is in data");
}

void quenched_holder(const CheckContext& c, CheckResult& out) {
  const auto n = replicas(c, 1);
  const double N = num(c, "N", 1.0, 1e4);
  const int K = static_cast<int>(count(c, "K", 1, 4096));
  const double h0 = num(c, "h0", 1e-6, 0.1), T = num(c, "T", 1e-3, 10.0), burn = num(c, "burn_in", 0.0, T);
  const auto levels = count(c, "levels", 4, 12);
  const double sob = num(c, "sobolev_n", 0.5 + 1e-9, 10.0);
  const double lo = num(c, "slope_lo", 0.0, 2.0), hi = num(c, "slope_hi", 0.0, 2.0);
  const double cal_tol = num(c, "calibration_tol", 0.0, 1.0);
  const auto cal_n = count(c, "calibration_samples", 100, 10'000'000);
  const auto resamples = static_cast<int>(count(c, "resamples", 100, 100'000));
  const auto times = superprocess::uniform_times(T, h0);
  const auto eig = kernels::dirichlet_eigensystem(1, 0.5, K);
  const HeatKernelParams hp{1.0, 1, 2.0};
  const auto init = ParticleMeasure::uniform_cloud(0.0, 1.0, 1.0, static_cast<std::size_t>(std::lround(N)));
  const auto opt = sbm_options(c);
  const auto start = index_of(times, burn);
  std::vector<double> lags;
  std::vector<std::size_t> per_level;
  for (std::size_t l = 0; l < levels; ++l) {
    const std::size_t L = std::size_t{1} << l;
    lags.push_back(h0 * static_cast<double>(L));
    per_level.push_back(times.size() > start + L ? (times.size() - 1 - start) / L : 0);
  }
  std::size_t width = 0;
  for (auto k : per_level) width += k;
  const auto s = per_replica(n, width, [&](std::size_t r, std::span<double> o) {
    const auto path = superprocess::simulate_sbm(init, N, times, hp, c.cfg.seed, stream_id(c.tag, r), opt);
    const auto f = field::sample_eigen_path(path, eig, times, c.cfg.seed, stream_id(c.tag | 1u, r));
    std::vector<double> d(K);
    std::size_t j = 0;
    for (std::size_t l = 0; l < levels; ++l) {
      const std::size_t L = std::size_t{1} << l;
      for (std::size_t m = 0; m < per_level[l]; ++m) {
        const auto i = start + m * L;
        for (int k = 0; k < K; ++k) d[k] = f.coeffs(i + L, k) - f.coeffs(i, k);
        o[j++] = field::sobolev_norm(d, eig, sob).value;
      }
    }
  });
  std::vector<std::vector<double>> norms(levels);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t j = r * width;
    for (std::size_t l = 0; l < levels; ++l)
      for (std::size_t m = 0; m < per_level[l]; ++m) norms[l].push_back(s.data[j++]);
  }
  const auto est = field::holder_estimate(lags, norms, c.cfg.seed, resamples);
  const auto p = fmt("H_-%g, K=%d, h0=%g, levels=%zu, replicas=%zu, N=%g", sob, K, h0, levels, n, N);
  out.rows.push_back(bound_row("Hoelder exponent of t -> X_t", p, est.defined ? est.slope : std::nan(""), lo, hi));
  out.data["slope_ci"] = {est.ci.lo, est.ci.hi};
  out.data["increments_per_level"] = per_level;

  std::vector<std::vector<double>> lin(levels), bm(levels);
  field::NormalStream z(c.cfg.seed, stream_id(c.tag | 2u, 0));
  for (std::size_t l = 0; l < levels; ++l) {
    lin[l].assign(cal_n, lags[l]);
    for (std::size_t i = 0; i < cal_n; ++i) bm[l].push_back(std::abs(std::sqrt(lags[l]) * z()));
  }
  const auto a = field::holder_estimate(lags, lin, c.cfg.seed, resamples);
  const auto b = field::holder_estimate(lags, bm, c.cfg.seed, resamples);
  out.rows.push_back(tolerance_row("calibration: Lipschitz path", fmt("samples=%zu", cal_n), 1.0, a.slope, cal_tol));
  out.rows.push_back(tolerance_row("calibration: Brownian path", fmt("samples=%zu", cal_n), 0.5, b.slope, cal_tol));

  out.series = {{"mean increment norm", est.lags, est.mean_norms}};
  out.plot.title = "increments of the quenched field in H_-1";
  out.plot.xlabel = "lag";
  out.plot.ylabel = "E |X(t+h) - X(t)|";
  out.plot.loglog = true;
  out.plot.fit_slope_of = 0;
}

void leptokurtosis(const CheckContext& c, CheckResult& out) {
  const auto n = replicas(c, 10'000);
  const double t = num(c, "t", 1e-3, 10.0), dt = num(c, "dt", 1e-4, t);
  const kernels::GaussianBump bump{num(c, "amplitude", -100.0, 100.0), num(c, "center", -10.0, 10.0),
                                   num(c, "width", 1e-2, 10.0)};
  const auto resamples = static_cast<int>(count(c, "resamples", 100, 100'000));
  const auto cal_n = count(c, "calibration_samples", 10'000, 10'000'000);
  const auto times = superprocess::uniform_times(t, dt);
  const auto s = per_replica(n, 2, [&](std::size_t r, std::span<double> o) {
    const auto path = superprocess::simulate_atom_catalyst(times, 1, c.cfg.seed, stream_id(c.tag, r));
    const double v = field::pairing_variance(path, bump, t, 0.5);
    field::NormalStream z(c.cfg.seed, stream_id(c.tag | 1u, r));
    o[0] = std::sqrt(v) * z();
    o[1] = v;
  });
  const auto cert = moments::leptokurtosis_certificate(s.column(0), c.cfg.seed, resamples);
  const auto p = fmt("atom catalyst, t=%g, bump=(%g, %g, %g), samples=%zu", t, bump.amplitude, bump.center, bump.width, n);
  out.rows.push_back(bound_row("lower 95% bootstrap bound of the excess kurtosis", p, cert.ci.lo,
                               std::numeric_limits<double>::min(), kInf));
  const auto v = s.column(1);
  const auto vs = stats::k_statistics(v);
  out.data["excess_kurtosis"] = cert.excess_kurtosis;
  out.data["ci"] = {cert.ci.lo, cert.ci.hi};
  out.data["variance_mixture_prediction"] = 3.0 * vs.k2 / (vs.mean * vs.mean);

  std::vector<double> g(cal_n);
  field::NormalStream z(c.cfg.seed, stream_id(c.tag | 2u, 0));
  for (auto& x : g) x = z();
  const auto gc = moments::leptokurtosis_certificate(g, c.cfg.seed, resamples);
  out.rows.push_back(bound_row("Gaussian calibration: CI contains 0", fmt("samples=%zu", cal_n), 0.0, gc.ci.lo, gc.ci.hi));
  out.data["calibration_ci"] = {gc.ci.lo, gc.ci.hi};
}

const kernels::PeriodicGrid kDualGrid{1, 256, -8.0, 16.0};

dual::DualProblem bump_problem(double t1, dual::ReactionScheme r) {
  dual::DualProblem p;
  p.psi = kernels::GridFunction::sample(kDualGrid, kernels::GaussianBump{1.5, 0.0, 0.6});
  const kernels::GaussianBump shape{1.0, 0.5, 0.8};
  p.forcing = [shape](double s, std::span<double> o) {
    for (int i = 0; i < kDualGrid.n; ++i) o[i] = (1.0 + std::sin(3.0 * s)) * shape(kDualGrid.coord(i));
  };
  p.t1 = t1;
  p.reaction = r;
  return p;
}

void dual_convergence(const CheckContext& c, CheckResult& out) {
  const double lam = num(c, "lambda", 1e-3, 100.0), t = num(c, "t", 1e-3, 10.0);
  const auto dts = nums(c, "dts", 1e-5, 1.0, 2);
  const double rlo = num(c, "ratio_lo", 0.0, 100.0), rhi = num(c, "ratio_hi", 0.0, 100.0);
  const double ric_tol = num(c, "riccati_tol", 0.0, 1.0);
  const double pdt = num(c, "picard_dt", 1e-5, 0.1), ptol = num(c, "picard_tol", 0.0, 1.0);
  const auto reference_dt = num(c, "reference_dt", 1e-6, 0.1);

  // spatially constant data reduce to u' = f(s) - u^2; frozen-forcing steps make this second order
  auto forcing_amp = [](double s) { return 1.0 + std::sin(3.0 * s); };
  dual::DualProblem cp;
  cp.psi = kernels::GridFunction::constant(kDualGrid, lam);
  cp.t1 = t;
  cp.reaction = dual::ReactionScheme::implicit_midpoint;
  cp.forcing = [&](double s, std::span<double> o) { std::fill(o.begin(), o.end(), forcing_amp(s)); };
  std::array<double, 1> ode_u{lam};
  {
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_dense_output(1e-14, 1e-14, ode::runge_kutta_dopri5<std::array<double, 1>>());
    ode::integrate_adaptive(
        stepper, [&](const std::array<double, 1>& y, std::array<double, 1>& dy, double s) { dy[0] = forcing_amp(s) - y[0] * y[0]; },
        ode_u, 0.0, t, 1e-3);
  }
  const std::vector<double> ode_v(kDualGrid.size(), ode_u[0]);
  plot::Series err{"constant data, forcing 1+sin(3s), vs ODE", {}, {}}, berr{"Gaussian data vs fine reference", {}, {}};
  const auto bp = bump_problem(t, dual::ReactionScheme::implicit_midpoint);
  const auto ref = dual::solve_dual(bp, reference_dt, false).final();
  for (double dt : dts) {
    err.x.push_back(dt);
    err.y.push_back(sup_diff(dual::solve_dual(cp, dt, false).final(), ode_v));
    berr.x.push_back(dt);
    berr.y.push_back(sup_diff(dual::solve_dual(bp, dt, false).final(), ref));
  }
  for (std::size_t i = 1; i < dts.size(); ++i) {
    out.rows.push_back(bound_row("error ratio, constant data with forcing", fmt("lambda=%g, dt %g -> %g", lam, dts[i - 1], dts[i]),
                                 err.y[i - 1] / err.y[i], rlo, rhi));
    out.rows.push_back(bound_row("error ratio, Gaussian data with forcing", fmt("dt %g -> %g", dts[i - 1], dts[i]),
                                 berr.y[i - 1] / berr.y[i], rlo, rhi));
  }
  const double exact = lam / (1.0 + lam * t);
  cp.forcing = nullptr;
  out.rows.push_back(tolerance_row("unforced constant data, implicit midpoint", fmt("lambda=%g, dt=%g", lam, dts.front()),
                                   exact, dual::solve_dual(cp, dts.front(), false).final()[0], ric_tol));
  cp.reaction = dual::ReactionScheme::automatic;
  out.rows.push_back(tolerance_row("exact Riccati splitting", fmt("lambda=%g, dt=%g", lam, dts.front()), exact,
                                   dual::solve_dual(cp, dts.front(), false).final()[0], ric_tol));

  dual::DualProblem one;
  one.psi = kernels::GridFunction::constant(kDualGrid, 1.0);
  one.t1 = 1.0;
  const auto pic_c = dual::picard_volterra_oracle(one, pdt, 200);
  out.rows.push_back(tolerance_row("Picard oracle, constant data", "psi=1, t=1", 0.5, pic_c.final()[0], ptol));
  const auto bump = bump_problem(t, dual::ReactionScheme::automatic);
  const double gap =
      sup_diff(dual::picard_volterra_oracle(bump, pdt, 200).final(), dual::solve_dual(bump, pdt, false).final());
  out.rows.push_back(tolerance_row("Picard oracle vs splitting, sup norm", fmt("dt=%g", pdt), 0.0, gap, ptol));
  out.series = {err, berr};
  out.plot.title = "dual solver, implicit-midpoint reaction";
  out.plot.xlabel = "dt";
  out.plot.ylabel = "sup error";
  out.plot.loglog = true;
  out.plot.fit_slope_of = 0;
}

void propagator_compose(const CheckContext& c, CheckResult& out) {
  const double t = num(c, "t", 1e-3, 10.0), r = num(c, "split", 0.0, t), dt = num(c, "dt", 1e-5, 1.0);
  const double fine_dt = num(c, "fine_dt", 1e-6, dt);
  const auto cases = count(c, "ck_cases", 1, 10'000);
  const double ck_tol = num(c, "ck_tol", 0.0, 1.0), sg_tol = num(c, "semigroup_tol", 0.0, 1.0);
  const int K = static_cast<int>(count(c, "orthonormal_K", 1, 512));
  const double on_tol = num(c, "orthonormal_tol", 0.0, 1.0);

  auto p = bump_problem(t, dual::ReactionScheme::automatic);
  const auto fine = dual::solve_dual(p, fine_dt, false).final();
  const auto oneshot = dual::solve_dual(p, dt, false).final();
  auto first = p, second = p;
  first.t1 = r;
  second.t0 = r;
  second.psi.values = dual::solve_dual(first, dt, false).final();
  const auto composed = dual::solve_dual(second, dt, false).final();
  const double one_err = sup_diff(oneshot, fine);
  out.rows.push_back(bound_row("U(t,r) U(r,0) vs U(t,0)", fmt("t=%g, r=%g, dt=%g", t, r, dt),
                               sup_diff(composed, oneshot), 0.0, 2.0 * one_err + 1e-12));
  out.data["one_shot_error"] = one_err;

  Philox4x32 g(c.cfg.seed, stream_id(c.tag, 0));
  double ck = 0.0;
  for (std::size_t i = 0; i < cases; ++i) {
    const double s = 0.05 + 2 * g.uniform(), u = 0.05 + 2 * g.uniform();
    const double x = 4 * g.uniform() - 2, y = 4 * g.uniform() - 2, kappa = 0.25 + g.uniform();
    const auto q = integrate([&](double z) { return kernels::heat_kernel(s, x, z, kappa) * kernels::heat_kernel(u, z, y, kappa); },
                             -kInf, kInf, {1e-12, 1e-10, 20});
    ck = std::max(ck, std::abs(q.value - kernels::heat_kernel(s + u, x, y, kappa)));
  }
  out.rows.push_back(tolerance_row("Chapman-Kolmogorov, heat kernel", fmt("cases=%zu", cases), 0.0, ck, ck_tol));

  const HeatKernelParams hp{1.0, 1, 2.0};
  const auto f = kernels::GridFunction::sample(kDualGrid, kernels::GaussianBump{1.0, 0.3, 0.7});
  const auto ab = kernels::apply_semigroup(kernels::apply_semigroup(f, 0.2, hp), 0.5, hp);
  const auto direct = kernels::apply_semigroup(f, 0.7, hp);
  out.rows.push_back(tolerance_row("spectral semigroup law", "0.2 + 0.5 = 0.7", 0.0, sup_diff(ab.values, direct.values),
                                   sg_tol));

  const auto eig = kernels::dirichlet_eigensystem(1, 0.5, K);
  double on = 0.0;
  for (int j = 0; j < K; ++j)
    for (int k = j; k < K; ++k) {
      const auto q = integrate([&](double x) { return eig.mode(j, x) * eig.mode(k, x); }, 0.0, 1.0, {1e-13, 1e-12, 20});
      on = std::max(on, std::abs(q.value - (j == k ? 1.0 : 0.0)));
    }
  out.rows.push_back(tolerance_row("Dirichlet eigenmodes orthonormal", fmt("K=%d", K), 0.0, on, on_tol));
}

affine::AffineModel affine_model(const CheckContext& c, affine::Kind kind) {
  affine::AffineModel m{kind, num(c, "b", -100.0, 100.0), num(c, "beta", 1e-6, 100.0), num(c, "sigma", 1e-6, 100.0),
                        num(c, "x0", kind == affine::Kind::cir ? 0.0 : -100.0, 100.0)};
  return m;
}

void affine_ou(const CheckContext& c, CheckResult& out) {
  const auto n = replicas(c, 2);
  const auto m = affine_model(c, affine::Kind::ou);
  const double T = num(c, "T", 1e-3, 100.0), dt = num(c, "dt", 1e-6, T);
  const auto us = nums(c, "us", -100.0, 100.0, 1);
  const double col_tol = num(c, "collinearity_tol", 0.0, 1.0), flow_tol = num(c, "flow_tol", 0.0, 1.0);
  const double ratio_tol = num(c, "mu_ratio_tol", 0.0, 1.0);
  const auto x = affine::euler_maruyama(m, dt, T, n, c.cfg.seed, stream_id(c.tag, 0));
  std::vector<affine::TransformRow> rows;
  for (double u : us) {
    std::vector<double> re(n), im(n);
    for (std::size_t r = 0; r < n; ++r) {
      re[r] = std::cos(u * x[r]);
      im[r] = std::sin(u * x[r]);
    }
    const auto a = affine::ou_transform(m, T, {0.0, u});
    const auto mr = stats::mean_se(re), mi = stats::mean_se(im);
    const auto p = fmt("u=%gi, T=%g, dt=%g", u, T, dt);
    out.rows.push_back(statistical_row("Re E exp(u z_T)", p, a.real(), mr));
    out.rows.push_back(statistical_row("Im E exp(u z_T)", p, a.imag(), mi));
  }
  out.rows.push_back(statistical_row("E z_T", fmt("T=%g, dt=%g", T, dt), affine::mean(m, T), stats::mean_se(x)));
  double col = 0.0, flow = 0.0;
  for (double t : {0.3, T, 2.5})
    for (double u : us) col = std::max(col, affine::collinearity_residual(m, t, {0.0, u}));
  for (double u : us) {
    const auto full = affine::ou_exponents(m, T + 0.35, {0.0, u});
    const auto a = affine::ou_exponents(m, T, {0.0, u});
    const auto b = affine::ou_exponents(m, 0.35, a.psi);
    flow = std::max({flow, std::abs(full.psi - b.psi), std::abs(full.phi - (a.phi + b.phi))});
  }
  out.rows.push_back(tolerance_row("log-transform collinear in z0", "z0 in {1,2,3}", 0.0, col, col_tol));
  out.rows.push_back(tolerance_row("psi/phi flow property", fmt("t=%g, s=0.35", T), 0.0, flow, flow_tol));

  // the catalytic field's characteristic-Laplace functional is log-affine in the initial measure
  const kernels::GaussianBump phi{1.5, 0.0, 0.5};
  const auto g = kernels::PeriodicGrid::padded(-3.0, 3.0, 1.0, 1.0, 256);
  const auto density = kernels::GridFunction::sample(g, [](double y) { return std::exp(-y * y / 0.5) / std::sqrt(0.5 * pi); });
  auto twice = density;
  for (auto& v : twice.values) v *= 2.0;
  const auto ph = kernels::GridFunction::sample(g, phi);
  const auto lam = kernels::GridFunction::constant(g, 0.5);
  const double l1 = std::log(dual::char_laplace_functional(density, ph, lam, 1.0, 0.01));
  const double l2 = std::log(dual::char_laplace_functional(twice, ph, lam, 1.0, 0.01));
  out.rows.push_back(tolerance_row("log functional ratio, 2 mu vs mu", "lambda=0.5, Gaussian bump, t=1", 2.0, l2 / l1,
                                   ratio_tol));
}

void affine_cir(const CheckContext& c, CheckResult& out) {
  const auto n = replicas(c, 2);
  const auto m = affine_model(c, affine::Kind::cir);
  const double T = num(c, "T", 1e-3, 100.0), dt = num(c, "dt", 1e-6, T);
  const auto us = nums(c, "us", -100.0, 0.0, 1);
  const double ric_tol = num(c, "riccati_tol", 0.0, 1.0), col_tol = num(c, "collinearity_tol", 0.0, 1.0);
  const double flow_tol = num(c, "flow_tol", 0.0, 1.0);
  const auto y = affine::euler_maruyama(m, dt, T, n, c.cfg.seed, stream_id(c.tag, 0));
  for (double u : us) {
    std::vector<double> e(n);
    for (std::size_t r = 0; r < n; ++r) e[r] = std::exp(u * y[r]);
    out.rows.push_back(statistical_row("E exp(u y_T)", fmt("u=%g, T=%g, dt=%g", u, T, dt),
                                       affine::cir_transform(m, T, u), stats::mean_se(e)));
  }
  out.rows.push_back(statistical_row("E y_T", fmt("T=%g, dt=%g", T, dt), affine::mean(m, T), stats::mean_se(y)));
  double ric = 0.0, col = 0.0, flow = 0.0;
  for (double b : {0.0, m.b}) {
    auto mm = m;
    mm.b = b;
    for (double u : us)
      for (double t : {0.1, T, 4.0}) {
        const auto a = affine::cir_exponents(mm, t, u), e = affine::cir_exponents_exact(mm, t, u);
        ric = std::max({ric, std::abs(a.psi - e.psi), std::abs(a.phi - e.phi)});
      }
  }
  for (double t : {0.3, T, 2.5})
    for (double u : us) col = std::max(col, affine::collinearity_residual(m, t, {u, 0.0}));
  for (double u : us) {
    const auto full = affine::cir_exponents(m, T + 0.35, u);
    const auto a = affine::cir_exponents(m, T, u);
    const auto b = affine::cir_exponents(m, 0.35, a.psi);
    flow = std::max({flow, std::abs(full.psi - b.psi), std::abs(full.phi - (a.phi + b.phi))});
  }
  out.rows.push_back(tolerance_row("Riccati integration vs closed form", "b in {0, b}", 0.0, ric, ric_tol));
  out.rows.push_back(tolerance_row("log-transform collinear in y0", "y0 in {1,2,3}", 0.0, col, col_tol));
  out.rows.push_back(tolerance_row("psi/phi flow property", fmt("t=%g, s=0.35", T), 0.0, flow, flow_tol));
  out.notes.push_back("drift implemented as b - beta y");
}

}  // namespace

const std::vector<CheckSpec>& registry() {
  static const std::vector<CheckSpec> r = {
      {"atom-variance-quarter",
       "field driven by a single Brownian atom: annealed variance at the atom's start is 1/4 in d = 1",
       {{"replicas", 20000}, {"t", 1.0}, {"x", 0.0}, {"dt", 0.01}, {"ratio", 1.15}, {"tau_min", 1e-7},
        {"abs_tol", 0.005}},
       atom_variance_quarter},
      {"sbm-mass-martingale", "total mass of the branching catalyst is a martingale with variance 2t",
       {{"replicas", 2000}, {"N", 32.0}, {"times", {0.5, 1.0}}, {"kappa", 1.0}},
       sbm_mass_martingale},
      {"sbm-total-mass-laplace", "Laplace transform of the total mass is exp(-lambda/(1 + lambda t))",
       {{"replicas", 5000}, {"N", 2000.0}, {"lambdas", {0.5, 1.0, 2.0}}, {"times", {0.5, 1.0}}},
       sbm_total_mass_laplace},
      {"first-moment", "first moment measure of the catalyst is the heat flow of the initial measure",
       {{"replicas", 3000}, {"N", 32.0}, {"t", 1.0}, {"smoothing", 0.01}, {"points", {0.0, 0.5, 1.0}}, {"kappa", 1.0}},
       first_moment},
      {"second-moment", "second moment measures of the catalyst from the second Neumann coefficient",
       {{"replicas", 6000},
        {"N", 32.0},
        {"smoothing", 0.01},
        {"kappa", 1.0},
        {"time_pairs", {{1.0, 1.0}, {0.5, 1.0}}},
        {"point_pairs", {{0.0, 0.0}, {0.0, 0.5}}},
        {"lebesgue_tol", 1e-6}},
       second_moment},
      {"occupation-laplace", "joint Laplace functional of the catalyst and its weighted occupation time via the dual equation",
       {{"replicas", 5000},
        {"N", 50.0},
        {"t", 1.0},
        {"dual_dt", 1.0 / 1024},
        {"psi_a", 1.0},
        {"phi_a", 0.5},
        {"psi_b", 0.5},
        {"phi_b", 1.0},
        {"pieces", {4.0, 16.0, 64.0}},
        {"min_ratio", 2.5}},
       occupation_laplace},
      {"char-laplace", "characteristic-Laplace functional of the field and catalyst via the dual equation",
       {{"replicas", 5000},
        {"N", 32.0},
        {"t", 1.0},
        {"dt", 0.01},
        {"amplitude", 1.5},
        {"center", 0.0},
        {"width", 0.5},
        {"lambdas", {0.0, 0.5}},
        {"dual_dt", 0.001},
        {"grid_n", 512}},
       char_laplace},
      {"fourth-moment-growth", "fourth moment of the L2 norm of the field grows at most like t^2",
       {{"replicas", 4000},
        {"N", 4.0},
        {"t", 0.5},
        {"dt", 0.01},
        {"ratio", 1.2},
        {"tau_min", 1e-7},
        {"box_length", 8.0},
        {"modes", 1024},
        {"slope_times", {0.25, 0.5, 1.0, 2.0}},
        {"slope_max", 2.1}},
       fourth_moment_growth},
      {"quenched-holder", "quenched field paths are Hoelder continuous of order below 1/2 in H_-n, n > d/2",
       {{"replicas", 8},
        {"N", 64.0},
        {"K", 128},
        {"h0", 1.0 / 1024},
        {"T", 1.0},
        {"burn_in", 0.25},
        {"levels", 4},
        {"sobolev_n", 1.0},
        {"slope_lo", 0.40},
        {"slope_hi", 0.55},
        {"calibration_tol", 0.03},
        {"calibration_samples", 4000},
        {"resamples", 1000}},
       quenched_holder},
      {"leptokurtosis", "annealed field values are leptokurtic",
       {{"replicas", 20000},
        {"t", 1.0},
        {"dt", 0.01},
        {"amplitude", 1.0},
        {"center", 0.0},
        {"width", 0.5},
        {"resamples", 1000},
        {"calibration_samples", 20000}},
       leptokurtosis},
      {"dual-convergence", "dual solver is second order and agrees with the Volterra form",
       {{"lambda", 2.0},
        {"t", 1.0},
        {"dts", {0.1, 0.05, 0.025}},
        {"ratio_lo", 3.2},
        {"ratio_hi", 4.8},
        {"riccati_tol", 1e-6},
        {"picard_dt", 0.005},
        {"picard_tol", 1e-4},
        {"reference_dt", 1.0 / 2048}},
       dual_convergence},
      {"propagator-compose", "solution operators of the dual equation compose as a two-parameter propagator",
       {{"t", 1.0},
        {"split", 0.37},
        {"dt", 0.01},
        {"fine_dt", 1e-4},
        {"ck_cases", 25},
        {"ck_tol", 1e-8},
        {"semigroup_tol", 1e-10},
        {"orthonormal_K", 6},
        {"orthonormal_tol", 1e-10}},
       propagator_compose},
      {"affine-ou", "Ornstein-Uhlenbeck transform is exponential-affine in the initial state",
       {{"replicas", 20000},
        {"b", 0.4},
        {"beta", 1.3},
        {"sigma", 0.8},
        {"x0", 0.7},
        {"T", 1.0},
        {"dt", 0.002},
        {"us", {0.9, 1.8}},
        {"collinearity_tol", 1e-10},
        {"flow_tol", 1e-13},
        {"mu_ratio_tol", 1e-8}},
       affine_ou},
      {"affine-cir", "Cox-Ingersoll-Ross Laplace transform solves a Riccati system and is affine in the initial state",
       {{"replicas", 20000},
        {"b", 0.6},
        {"beta", 1.1},
        {"sigma", 0.7},
        {"x0", 0.9},
        {"T", 1.0},
        {"dt", 0.002},
        {"us", {-0.5, -1.5}},
        {"riccati_tol", 1e-9},
        {"collinearity_tol", 1e-10},
        {"flow_tol", 1e-9}},
       affine_cir},
  };
  return r;
}

}  // namespace catou::harness::detail
