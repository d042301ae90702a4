#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "catou/kernels.hpp"
#include "catou/superprocess.hpp"

namespace catou::dual {

// Fills Phi(s, .) on the problem grid. An empty Forcing means Phi = 0.
using Forcing = std::function<void(double s, std::span<double> out)>;

enum class ReactionScheme {
  automatic,          // exact Riccati step when beta = 1, implicit midpoint otherwise
  implicit_midpoint,  // one Newton iteration of the implicit midpoint rule
};

// u' = Delta_a u - u^{1+beta} + Phi(s) on [t0, t1], u(t0) = psi.
// particles = N > 0 (beta = 1 only) replaces Phi by Phi (1 - u/N): the dual of
// the branching system with particles of mass 1/N.
struct DualProblem {
  kernels::GridFunction psi;
  Forcing forcing;
  double beta = 1.0;
  HeatKernelParams kernel{1.0, 1, 2.0};
  double t0 = 0.0;
  double t1 = 1.0;
  ReactionScheme reaction = ReactionScheme::automatic;
  double particles = 0.0;

  void validate() const;
};

struct DualSolution {
  kernels::PeriodicGrid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> u;  // u[i] on the grid at times[i]
  double step = 0.0;
  std::string scheme;
  double beta = 1.0;
  HeatKernelParams kernel;
  std::vector<std::string> warnings;
  int iterations = 0;           // Picard oracle only
  double last_increment = 0.0;  // Picard oracle only

  const std::vector<double>& final() const { return u.back(); }
};

class InstabilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Strang splitting: half linear step, reaction step with Phi frozen at the
// step midpoint, half linear step. The step is shrunk so that it divides
// t1 - t0. With keep_history = false only the first and last states are kept.
DualSolution solve_dual(const DualProblem& problem, double dt, bool keep_history = true);

// Picard iteration of the mild form, trapezoid rule in time, linear flow in
// Fourier space. Starts from u = V psi and performs at most `iterations`
// sweeps, stopping early once the sup-norm increment falls below tol.
DualSolution picard_volterra_oracle(const DualProblem& problem, double dt, int iterations,
                                    double tol = 1e-13);

// Phi reversed in time on [0, t]: s -> Phi(t - s). Converts a forcing given in
// catalyst time into the dual time of the backward equation.
Forcing time_reversed(Forcing phi, double t);

// Piecewise-constant forcing, Phi_N(s) = Phi(s_k) on [s_k, s_{k+1}) for N
// equal pieces of [t0, t1].
Forcing step_function(Forcing phi, double t0, double t1, int pieces);

using InitialMeasure = std::variant<superprocess::ParticleMeasure, kernels::GridFunction>;

// <u, mu>: linear interpolation at particle positions (grid treated as
// periodic), trapezoid sum for a density on the same grid.
double pairing(std::span<const double> u, const kernels::PeriodicGrid& grid, const InitialMeasure& mu);

struct LaplaceOptions {
  double beta = 1.0;
  HeatKernelParams kernel{1.0, 1, 2.0};
  ReactionScheme reaction = ReactionScheme::automatic;
  // N > 0: exact functional of the particle system with mass 1/N per particle.
  // mu must then be a ParticleMeasure with that mass.
  double particles = 0.0;
};

// exp(-<u(t), mu>) for u solving the dual equation with initial data psi and
// catalyst-time forcing Phi (Phi(s) acts at catalyst time s, i.e. at dual
// time t - s). Equals E_mu exp(-<psi, Z_t> - int_0^t <Phi(s), Z_s> ds).
double laplace_functional(const InitialMeasure& mu, const kernels::GridFunction& psi, const Forcing& forcing,
                          double t, double dt, const LaplaceOptions& opt = {});
double laplace_exponent(const InitialMeasure& mu, const kernels::GridFunction& psi, const Forcing& forcing,
                        double t, double dt, const LaplaceOptions& opt = {});

struct CharLaplaceOptions {
  double field_kappa = 0.5;  // generator of the field, (1/2) Delta
  LaplaceOptions dual;
};

// E_mu[exp(i <phi, X_t> - <lambda, Z_t>)] for the catalytic field X with
// catalyst Z. phi and lambda are sampled on the dual grid. The forcing is
// (1/2) G_phi^2 in dual time, the exact Gaussian identity E e^{iY} = e^{-Var Y/2}.
double char_laplace_functional(const InitialMeasure& mu, const kernels::GridFunction& phi,
                             const kernels::GridFunction& lambda, double t, double dt,
                             const CharLaplaceOptions& opt = {});

void write_solution_csv(std::ostream& os, const DualSolution& sol, std::size_t stride = 1);
std::string solution_metadata_json(const DualSolution& sol);

}  // namespace catou::dual
