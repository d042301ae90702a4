#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "catou/parallel.hpp"

namespace catou::affine {

enum class Kind { ou, cir };

// ou:  dz = (b - beta z) dt + sqrt(2) sigma dB
// cir: dy = (b - beta y) dt + sigma sqrt(2 y) dB
struct AffineModel {
  Kind kind = Kind::ou;
  double b = 0.0;
  double beta = 1.0;
  double sigma = 1.0;
  double x0 = 0.0;

  void validate() const;
};

// log E_x exp(u X_t) = x psi(t, u) + phi(t, u)
template <class T>
struct Exponents {
  T psi{};
  T phi{};
};

Exponents<std::complex<double>> ou_exponents(const AffineModel& m, double t, std::complex<double> u);
std::complex<double> ou_transform(const AffineModel& m, double t, std::complex<double> u);

struct RiccatiOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
};

// psi' = -beta psi + sigma^2 psi^2, phi' = b psi, psi(0) = u <= 0, by
// Dormand-Prince with dense output.
Exponents<double> cir_exponents(const AffineModel& m, double t, double u, const RiccatiOptions& opt = {});
double cir_transform(const AffineModel& m, double t, double u, const RiccatiOptions& opt = {});
// closed form of the same Riccati system
Exponents<double> cir_exponents_exact(const AffineModel& m, double t, double u);

// Terminal values of an explicit Euler-Maruyama scheme; the CIR square root
// uses the positive part of the state (full truncation). Replica r draws
// from Philox stream (stream, r).
std::vector<double> euler_maruyama(const AffineModel& m, double dt, double T, std::size_t replicas,
                                   std::uint64_t seed, std::uint64_t stream = 0, Exec exec = Exec::parallel);

// E X_T for either model
double mean(const AffineModel& m, double T);

// |log(F(1) F(3) / F(2)^2)| where F(x) is the transform started from x;
// zero iff the log-transform is affine in the initial state. cir uses Re u.
double collinearity_residual(const AffineModel& m, double t, std::complex<double> u);

struct TransformRow {
  double t = 0.0;
  std::complex<double> u;
  std::complex<double> analytic;
  std::complex<double> mc;
  double se = 0.0;
};

// t,u_re,u_im,analytic_re,analytic_im,mc_re,mc_im,se
void write_transform_csv(std::ostream& os, std::span<const TransformRow> rows);

}  // namespace catou::affine
