#include "catou/affine_ref.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "catou/gaussian_field.hpp"

namespace catou::affine {

void AffineModel::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("AffineModel: beta must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("AffineModel: sigma must be positive");
  if (kind == Kind::cir && !(x0 >= 0.0)) throw std::invalid_argument("AffineModel: CIR needs x0 >= 0");
}

Exponents<std::complex<double>> ou_exponents(const AffineModel& m, double t, std::complex<double> u) {
  m.validate();
  if (m.kind != Kind::ou) throw std::invalid_argument("ou_exponents: model is not OU");
  const double e1 = -std::expm1(-m.beta * t), e2 = -std::expm1(-2.0 * m.beta * t);
  return {u * std::exp(-m.beta * t), u * (m.b / m.beta) * e1 + u * u * (m.sigma * m.sigma / (2.0 * m.beta)) * e2};
}

std::complex<double> ou_transform(const AffineModel& m, double t, std::complex<double> u) {
  const auto e = ou_exponents(m, t, u);
  return std::exp(m.x0 * e.psi + e.phi);
}

Exponents<double> cir_exponents(const AffineModel& m, double t, double u, const RiccatiOptions& opt) {
  m.validate();
  if (m.kind != Kind::cir) throw std::invalid_argument("cir_exponents: model is not CIR");
  if (u > 0.0) throw std::invalid_argument("cir_exponents: u must be <= 0 (Laplace domain)");
  if (t < 0.0) throw std::invalid_argument("cir_exponents: negative time");
  using State = std::array<double, 2>;
  State x{u, 0.0};
  if (t == 0.0) return {u, 0.0};
  const double s2 = m.sigma * m.sigma;
  auto rhs = [&](const State& y, State& dy, double) {
    dy[0] = -m.beta * y[0] + s2 * y[0] * y[0];
    dy[1] = m.b * y[0];
  };
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_dense_output(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<State>());
  ode::integrate_adaptive(stepper, rhs, x, 0.0, t, std::min(t, 0.01));
  if (!std::isfinite(x[0]) || !std::isfinite(x[1])) throw std::runtime_error("cir_exponents: Riccati blow-up");
  return {x[0], x[1]};
}

double cir_transform(const AffineModel& m, double t, double u, const RiccatiOptions& opt) {
  const auto e = cir_exponents(m, t, u, opt);
  return std::exp(m.x0 * e.psi + e.phi);
}

Exponents<double> cir_exponents_exact(const AffineModel& m, double t, double u) {
  m.validate();
  const double s2 = m.sigma * m.sigma, e = -std::expm1(-m.beta * t);
  const double den = 1.0 - u * s2 * e / m.beta;
  return {u * std::exp(-m.beta * t) / den, -(m.b / s2) * std::log(den)};
}

std::vector<double> euler_maruyama(const AffineModel& m, double dt, double T, std::size_t replicas,
                                   std::uint64_t seed, std::uint64_t stream, Exec exec) {
  m.validate();
  if (!(dt > 0.0) || T < 0.0) throw std::invalid_argument("euler_maruyama: need dt > 0 and T >= 0");
  const auto n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  const double h = n > 0 ? T / n : 0.0, sq = std::sqrt(h);
  std::vector<double> out(replicas);
  for_each_index(
      replicas,
      [&](std::size_t r) {
        field::NormalStream z(seed, stream_id(static_cast<std::uint32_t>(stream), r));
        double x = m.x0;
        for (std::size_t k = 0; k < n; ++k) {
          if (m.kind == Kind::ou) {
            x += (m.b - m.beta * x) * h + std::sqrt(2.0) * m.sigma * sq * z();
          } else {
            const double xp = std::max(x, 0.0);
            x += (m.b - m.beta * xp) * h + m.sigma * std::sqrt(2.0 * xp) * sq * z();
          }
        }
        out[r] = m.kind == Kind::cir ? std::max(x, 0.0) : x;
      },
      exec);
  return out;
}

double mean(const AffineModel& m, double T) {
  m.validate();
  return m.x0 * std::exp(-m.beta * T) - (m.b / m.beta) * std::expm1(-m.beta * T);
}

double collinearity_residual(const AffineModel& m, double t, std::complex<double> u) {
  auto f = [&](double x) {
    AffineModel mm = m;
    mm.x0 = x;
    return mm.kind == Kind::ou ? ou_transform(mm, t, u) : std::complex<double>(cir_transform(mm, t, u.real()));
  };
  const auto f1 = f(1.0), f2 = f(2.0), f3 = f(3.0);
  return std::abs(std::log(f1 * f3 / (f2 * f2)));
}

void write_transform_csv(std::ostream& os, std::span<const TransformRow> rows) {
  os << "t,u_re,u_im,analytic_re,analytic_im,mc_re,mc_im,se\n";
  os.precision(17);
  for (const auto& r : rows)
    os << r.t << ',' << r.u.real() << ',' << r.u.imag() << ',' << r.analytic.real() << ',' << r.analytic.imag() << ','
       << r.mc.real() << ',' << r.mc.imag() << ',' << r.se << '\n';
}

}  // namespace catou::affine
