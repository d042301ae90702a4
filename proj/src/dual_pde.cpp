#include "catou/dual_pde.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include "json.hpp"

namespace catou::dual {

using kernels::GridFunction;
using kernels::PeriodicGrid;
using kernels::SpectralPropagator;

void DualProblem::validate() const {
  kernel.validate();
  if (psi.values.size() != psi.grid.size()) throw std::invalid_argument("DualProblem: psi does not match grid");
  if (psi.grid.d != kernel.d) throw std::invalid_argument("DualProblem: grid and kernel dimension differ");
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("DualProblem: beta must lie in (0, 1]");
  if (!(t1 >= t0)) throw std::invalid_argument("DualProblem: need t0 <= t1");
  for (double v : psi.values)
    if (!(v >= 0.0)) throw std::invalid_argument("DualProblem: psi must be nonnegative");
  if (!(particles >= 0.0)) throw std::invalid_argument("DualProblem: particles must be >= 0");
  if (particles > 0.0 && beta != 1.0) throw std::invalid_argument("DualProblem: finite particle number needs beta = 1");
  if (particles > 0.0)
    for (double v : psi.values)
      if (!(v < particles)) throw std::invalid_argument("DualProblem: psi must stay below the particle number");
}

namespace {

constexpr double kNegTol = 1e-12;

int step_count(double span, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dual solver: dt must be positive");
  if (span == 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
}

double power_term(double u, double beta) {
  return beta == 1.0 ? u * std::abs(u) : u * std::pow(std::abs(u), beta);
}

void clamp_or_throw(std::span<double> u, double s) {
  for (auto& v : u) {
    if (v < 0.0) {
      if (v < -kNegTol) throw InstabilityError("dual solver: negative value " + std::to_string(v) +
                                               " at s = " + std::to_string(s));
      v = 0.0;
    }
  }
}

void check_forcing(std::span<const double> phi, double s) {
  for (double v : phi)
    if (!(v >= -kNegTol)) throw std::invalid_argument("dual solver: forcing must be nonnegative (s = " +
                                                      std::to_string(s) + ")");
}

}  // namespace

DualSolution solve_dual(const DualProblem& problem, double dt, bool keep_history) {
  problem.validate();
  const auto& grid = problem.psi.grid;
  const int n = step_count(problem.t1 - problem.t0, dt);
  const double h = n > 0 ? (problem.t1 - problem.t0) / n : 0.0;
  const bool riccati = problem.beta == 1.0 && problem.reaction == ReactionScheme::automatic;
  const double inv_n = problem.particles > 0.0 ? 1.0 / problem.particles : 0.0;

  DualSolution sol;
  sol.grid = grid;
  sol.step = h;
  sol.beta = problem.beta;
  sol.kernel = problem.kernel;
  sol.scheme = riccati ? "strang+riccati" : "strang+implicit-midpoint";
  sol.times.push_back(problem.t0);
  sol.u.push_back(problem.psi.values);

  SpectralPropagator prop(grid, problem.kernel);
  std::vector<double> u = problem.psi.values, phi(grid.size(), 0.0);
  bool stiff_warned = false;
  for (int k = 0; k < n; ++k) {
    const double s = problem.t0 + k * h;
    prop.apply(u, 0.5 * h);
    clamp_or_throw(u, s + 0.5 * h);
    if (problem.forcing) {
      problem.forcing(s + 0.5 * h, phi);
      check_forcing(phi, s + 0.5 * h);
    }
    double umax = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double u0 = u[i], f = std::max(phi[i], 0.0);
      umax = std::max(umax, u0);
      if (riccati && inv_n > 0.0) {
        // exact flow of u' = f - (f/N) u - u^2: w = u - r+ solves w' = -w (w + D)
        const double a = f * inv_n, D = std::sqrt(a * a + 4.0 * f), rp = 0.5 * (D - a), w0 = u0 - rp;
        const double tau = D * h < 1e-12 ? h : -std::expm1(-D * h) / D;
        u[i] = rp + w0 * std::exp(-D * h) / (1.0 + w0 * tau);
      } else if (riccati) {
        // exact flow of u' = f - u^2 with f frozen
        const double c = std::sqrt(f);
        const double tau = c * h < 1e-8 ? h : std::tanh(c * h) / c;
        u[i] = (u0 + f * tau) / (1.0 + u0 * tau);
      } else {
        const double jac = (1.0 + problem.beta) * std::pow(std::abs(u0), problem.beta) + f * inv_n;
        u[i] = u0 + h * (f * (1.0 - u0 * inv_n) - power_term(u0, problem.beta)) / (1.0 + 0.5 * h * jac);
      }
    }
    if (!riccati && !stiff_warned && h * (1.0 + problem.beta) * std::pow(umax, problem.beta) > 1.0) {
      sol.warnings.push_back("reaction step is stiff (h * g'(u) > 1); reduce dt");
      stiff_warned = true;
    }
    prop.apply(u, 0.5 * h);
    clamp_or_throw(u, s + h);
    if (keep_history || k + 1 == n) {
      sol.times.push_back(k + 1 == n ? problem.t1 : s + h);
      sol.u.push_back(u);
    }
  }
  return sol;
}

DualSolution picard_volterra_oracle(const DualProblem& problem, double dt, int iterations, double tol) {
  problem.validate();
  if (iterations < 1) throw std::invalid_argument("picard_volterra_oracle: need at least one iteration");
  const auto& grid = problem.psi.grid;
  const int m = step_count(problem.t1 - problem.t0, dt);
  const double h = m > 0 ? (problem.t1 - problem.t0) / m : 0.0;
  SpectralPropagator prop(grid, problem.kernel);
  const std::size_t ns = prop.spectral_size();
  const auto& sym = prop.symbol();

  DualSolution sol;
  sol.grid = grid;
  sol.step = h;
  sol.beta = problem.beta;
  sol.kernel = problem.kernel;
  sol.scheme = "picard-volterra-trapezoid";
  for (int i = 0; i <= m; ++i) sol.times.push_back(i == m ? problem.t1 : problem.t0 + i * h);

  // V_{s_i - t0} psi, which is also the starting iterate
  std::vector<std::complex<double>> psi_hat(ns), tmp(ns);
  prop.forward(problem.psi.values, psi_hat);
  std::vector<std::vector<double>> free_part(m + 1, std::vector<double>(grid.size()));
  for (int i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j < ns; ++j) tmp[j] = psi_hat[j] * std::exp(-(sol.times[i] - problem.t0) * sym[j]);
    prop.backward(tmp, free_part[i]);
  }
  std::vector<std::vector<double>> phi(m + 1, std::vector<double>(grid.size(), 0.0));
  if (problem.forcing)
    for (int i = 0; i <= m; ++i) {
      problem.forcing(sol.times[i], phi[i]);
      check_forcing(phi[i], sol.times[i]);
    }

  std::vector<double> decay(ns);
  for (std::size_t j = 0; j < ns; ++j) decay[j] = std::exp(-h * sym[j]);

  auto u = free_part;
  std::vector<std::complex<double>> acc(ns), f_prev(ns), f_next(ns);
  std::vector<double> f(grid.size()), conv(grid.size());
  double prev_dist = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= iterations; ++it) {
    auto next = free_part;
    std::fill(acc.begin(), acc.end(), std::complex<double>{});
    auto source = [&](int i, std::vector<std::complex<double>>& out) {
      for (std::size_t g = 0; g < f.size(); ++g) f[g] = phi[i][g] - power_term(u[i][g], problem.beta);
      prop.forward(f, out);
    };
    if (m > 0) source(0, f_prev);
    for (int i = 0; i < m; ++i) {
      source(i + 1, f_next);
      for (std::size_t j = 0; j < ns; ++j)
        acc[j] = decay[j] * acc[j] + 0.5 * h * (decay[j] * f_prev[j] + f_next[j]);
      prop.backward(acc, conv);
      for (std::size_t g = 0; g < conv.size(); ++g) next[i + 1][g] += conv[g];
      std::swap(f_prev, f_next);
    }
    double dist = 0.0, scale = 1.0;
    for (int i = 0; i <= m; ++i)
      for (std::size_t g = 0; g < grid.size(); ++g) {
        dist = std::max(dist, std::abs(next[i][g] - u[i][g]));
        scale = std::max(scale, std::abs(next[i][g]));
      }
    u.swap(next);
    sol.iterations = it;
    sol.last_increment = dist;
    if (dist <= tol * scale) break;
    if (it >= 5 && dist >= prev_dist)
      throw DivergenceError("picard_volterra_oracle: increments stopped decreasing at iteration " +
                            std::to_string(it) + " (sup distance " + std::to_string(dist) + ")");
    prev_dist = dist;
  }
  for (int i = 0; i <= m; ++i) clamp_or_throw(u[i], sol.times[i]);
  sol.u = std::move(u);
  return sol;
}

Forcing time_reversed(Forcing phi, double t) {
  if (!phi) return {};
  return [phi = std::move(phi), t](double s, std::span<double> out) { phi(t - s, out); };
}

Forcing step_function(Forcing phi, double t0, double t1, int pieces) {
  if (pieces < 1 || !(t1 > t0)) throw std::invalid_argument("step_function: need pieces >= 1 and t0 < t1");
  if (!phi) return {};
  const double w = (t1 - t0) / pieces;
  return [phi = std::move(phi), t0, w, pieces](double s, std::span<double> out) {
    const int k = std::clamp(static_cast<int>(std::floor((s - t0) / w)), 0, pieces - 1);
    phi(t0 + k * w, out);
  };
}

namespace {

double interp_periodic(std::span<const double> u, const PeriodicGrid& g, std::span<const double> x) {
  const int n = g.n;
  auto locate = [&](double xi, int& i0, double& w) {
    double p = (xi - g.lo) / g.dx();
    p -= n * std::floor(p / n);
    i0 = static_cast<int>(std::floor(p));
    w = p - i0;
    if (i0 >= n) {
      i0 -= n;
    }
  };
  if (g.d == 1) {
    int i;
    double w;
    locate(x[0], i, w);
    return (1 - w) * u[i] + w * u[(i + 1) % n];
  }
  int i, j;
  double wi, wj;
  locate(x[0], i, wi);
  locate(x[1], j, wj);
  auto at = [&](int a, int b) { return u[static_cast<std::size_t>(a % n) * n + (b % n)]; };
  return (1 - wi) * ((1 - wj) * at(i, j) + wj * at(i, j + 1)) + wi * ((1 - wj) * at(i + 1, j) + wj * at(i + 1, j + 1));
}

}  // namespace

double pairing(std::span<const double> u, const PeriodicGrid& grid, const InitialMeasure& mu) {
  if (u.size() != grid.size()) throw std::invalid_argument("pairing: values do not match grid");
  if (const auto* pm = std::get_if<superprocess::ParticleMeasure>(&mu)) {
    if (pm->d != grid.d) throw std::invalid_argument("pairing: particle dimension does not match grid");
    double s = 0.0;
    for (std::size_t i = 0; i < pm->count(); ++i) s += interp_periodic(u, grid, pm->at(i));
    return pm->mass_per_particle * s;
  }
  const auto& dens = std::get<GridFunction>(mu);
  if (dens.values.size() != u.size() || dens.grid.n != grid.n || dens.grid.d != grid.d)
    throw std::invalid_argument("pairing: density must live on the solution grid");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * dens.values[i];
  return s * std::pow(grid.dx(), grid.d);
}

namespace {

// -log of the functional from the final dual state; for N particles of mass
// 1/N the functional is prod_i (1 - u(x_i)/N)^{N m_i}.
double exponent_from(std::span<const double> u, const PeriodicGrid& grid, const InitialMeasure& mu, double particles) {
  if (particles <= 0.0) return pairing(u, grid, mu);
  const auto* pm = std::get_if<superprocess::ParticleMeasure>(&mu);
  if (!pm) throw std::invalid_argument("finite particle number needs a particle initial measure");
  if (pm->d != grid.d) throw std::invalid_argument("pairing: particle dimension does not match grid");
  if (std::abs(pm->mass_per_particle * particles - 1.0) > 1e-12)
    throw std::invalid_argument("finite particle number: particles must carry mass 1/N");
  double s = 0.0;
  for (std::size_t i = 0; i < pm->count(); ++i) s -= std::log1p(-interp_periodic(u, grid, pm->at(i)) / particles);
  return s * particles * pm->mass_per_particle;
}

GridFunction particle_initial_data(GridFunction psi, double particles) {
  if (particles > 0.0)
    for (auto& v : psi.values) v = -particles * std::expm1(-v / particles);
  return psi;
}

}  // namespace

double laplace_exponent(const InitialMeasure& mu, const GridFunction& psi, const Forcing& forcing, double t,
                        double dt, const LaplaceOptions& opt) {
  DualProblem p;
  p.psi = particle_initial_data(psi, opt.particles);
  p.forcing = time_reversed(forcing, t);
  p.beta = opt.beta;
  p.kernel = opt.kernel;
  p.kernel.d = psi.grid.d;
  p.t0 = 0.0;
  p.t1 = t;
  p.reaction = opt.reaction;
  p.particles = opt.particles;
  const auto sol = solve_dual(p, dt, false);
  return exponent_from(sol.final(), psi.grid, mu, opt.particles);
}

double laplace_functional(const InitialMeasure& mu, const GridFunction& psi, const Forcing& forcing, double t,
                          double dt, const LaplaceOptions& opt) {
  return std::exp(-laplace_exponent(mu, psi, forcing, t, dt, opt));
}

double char_laplace_functional(const InitialMeasure& mu, const GridFunction& phi, const GridFunction& lambda,
                             double t, double dt, const CharLaplaceOptions& opt) {
  if (phi.grid.n != lambda.grid.n || phi.grid.lo != lambda.grid.lo || phi.grid.length != lambda.grid.length)
    throw std::invalid_argument("char_laplace_functional: phi and lambda must share a grid");
  const HeatKernelParams field{opt.field_kappa, phi.grid.d, 2.0};
  auto prop = std::make_shared<SpectralPropagator>(phi.grid, field);
  // dual-time forcing r -> (1/2) G_phi(r, .)^2 with G_phi(r) = exp(r kappa_X Delta) phi
  Forcing dual_forcing = [prop, values = phi.values](double r, std::span<double> out) {
    std::copy(values.begin(), values.end(), out.begin());
    prop->apply(out, std::max(r, 0.0));
    for (auto& v : out) v = 0.5 * v * v;
  };
  DualProblem p;
  p.psi = particle_initial_data(lambda, opt.dual.particles);
  p.forcing = dual_forcing;
  p.beta = opt.dual.beta;
  p.kernel = opt.dual.kernel;
  p.kernel.d = phi.grid.d;
  p.t0 = 0.0;
  p.t1 = t;
  p.reaction = opt.dual.reaction;
  p.particles = opt.dual.particles;
  const auto sol = solve_dual(p, dt, false);
  return std::exp(-exponent_from(sol.final(), phi.grid, mu, opt.dual.particles));
}

void write_solution_csv(std::ostream& os, const DualSolution& sol, std::size_t stride) {
  if (stride == 0) stride = 1;
  os << "time,grid_index,x,u\n";
  os.precision(17);
  for (std::size_t i = 0; i < sol.times.size(); i += stride) {
    for (std::size_t g = 0; g < sol.u[i].size(); ++g) {
      const double x = sol.grid.d == 1 ? sol.grid.coord(static_cast<int>(g)) : sol.grid.coord(static_cast<int>(g / sol.grid.n));
      os << sol.times[i] << ',' << g << ',' << x << ',' << sol.u[i][g] << '\n';
    }
  }
}

std::string solution_metadata_json(const DualSolution& sol) {
  nlohmann::ordered_json j;
  j["scheme"] = sol.scheme;
  j["dt"] = sol.step;
  j["grid"] = {{"d", sol.grid.d}, {"n", sol.grid.n}, {"lo", sol.grid.lo}, {"length", sol.grid.length}};
  j["beta"] = sol.beta;
  j["a"] = sol.kernel.stable_index;
  j["kappa_a"] = sol.kernel.kappa;
  j["warnings"] = sol.warnings;
  if (sol.iterations > 0) j["iterations"] = sol.iterations;
  return j.dump(2);
}

}  // namespace catou::dual
