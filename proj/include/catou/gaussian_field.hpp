#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "catou/kernels.hpp"
#include "catou/parallel.hpp"
#include "catou/rng.hpp"
#include "catou/stats.hpp"
#include "catou/superprocess.hpp"

namespace catou::field {

using superprocess::CatalystPath;
using superprocess::ParticleMeasure;

class ConditioningError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Gamma(x, y) = int_0^t int p(t-s, x, u) p(t-s, y, u) Z_s(du) ds on a set of points.
struct QuenchedCovariance {
  int d = 1;
  std::vector<double> points;  // size() * d
  Eigen::MatrixXd gamma;
  double t = 0.0;
  double kappa = 0.5;
  std::uint64_t path_seed = 0;
  std::uint64_t path_stream = 0;
  bool divergent = false;  // some entry is +inf (atom sitting on an evaluation point)

  std::size_t size() const { return d > 0 ? points.size() / d : 0; }
};

// Between two record times the catalyst is replaced by the average of the two
// recorded states, frozen over the interval; the time integral of the kernel
// product is then done in closed form (incomplete gamma functions). Exec
// selects the serial reference or the OpenMP assembly over matrix entries.
QuenchedCovariance quenched_covariance(const CatalystPath& path, std::span<const double> points, double t,
                                       double kappa, Exec exec = Exec::parallel);

// int_{tau0}^{tau1} int p(tau, x, u) p(tau, y, u) dtau for a single unit atom
// at u, kernel kappa * Delta in dimension d. +inf when x = y = u and tau0 = 0.
double kernel_product_integral(std::span<const double> x, std::span<const double> y, std::span<const double> u,
                               double tau0, double tau1, double kappa);

// Factorisation C = F F^T of a symmetric PSD matrix: pivoted LDL^T, or an
// eigendecomposition when LDL^T leaves a pivot below -jitter * trace.
// Eigenvalues below -jitter * trace throw; smaller negative ones are zeroed.
class GaussianFactor {
public:
  explicit GaussianFactor(const Eigen::MatrixXd& c, double jitter = 1e-10);
  Eigen::Index dim() const { return n_; }
  // out = F g
  void apply(const Eigen::VectorXd& g, Eigen::VectorXd& out) const;

private:
  Eigen::Index n_ = 0;
  Eigen::MatrixXd lower_;
  Eigen::VectorXd sqrt_d_;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic> perm_;
  Eigen::MatrixXd dense_;  // V sqrt(Lambda) when LDLT was rejected
  bool zero_ = false;
};

// replicas x size() centred Gaussian samples; replica r uses stream (stream, r).
Eigen::MatrixXd sample_quenched_field(const QuenchedCovariance& cov, std::size_t replicas, std::uint64_t seed,
                                      std::uint64_t stream = 0, Exec exec = Exec::parallel);

// Standard normal from a Philox stream.
class NormalStream {
public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);
  double operator()();

private:
  Philox4x32 g_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// C_jk = int_t^{t+h} exp(-(lambda_j + lambda_k)(t + h - s)) <phi_j phi_k, Z_s> ds,
// with <phi_j phi_k, Z_s> interpolated linearly between record times and the
// exponential weight integrated exactly.
Eigen::MatrixXd eigen_step_covariance(const CatalystPath& path, const kernels::EigenSystem& eig, double t,
                                      double h);

struct EigenField {
  std::vector<double> times;
  Eigen::MatrixXd coeffs;  // times.size() x K
  kernels::EigenSystem eig;

  Eigen::VectorXd at(double t) const;
  double value(double t, std::span<const double> x) const;
};

// A_k(t_{i+1}) = exp(-lambda_k h) A_k(t_i) + N(0, C_i), A(t_0) = 0.
EigenField sample_eigen_path(const CatalystPath& path, const kernels::EigenSystem& eig, std::span<const double> times,
                             std::uint64_t seed, std::uint64_t stream = 0);

struct SobolevNorm {
  double value = 0.0;
  // sum over the truncated modes of (1 + lambda_k)^{-n}; multiply by a bound
  // on E A_k^2 to control the truncation error
  double tail_factor = 0.0;
};

// (sum_k A_k^2 (1 + lambda_k)^{-n})^{1/2}; needs n > d/2.
SobolevNorm sobolev_norm(std::span<const double> coeffs, const kernels::EigenSystem& eig, double n);
SobolevNorm sobolev_norm(const EigenField& f, double t, double n);

struct HolderEstimate {
  bool defined = true;
  double slope = 0.0;
  double intercept = 0.0;
  stats::Interval ci;
  std::vector<double> lags;
  std::vector<double> mean_norms;
};

// Least-squares slope of log E|increment| against log lag. norms[l] holds
// increment norms observed at lags[l]. Bootstrap CI resamples within levels.
HolderEstimate holder_estimate(std::span<const double> lags, const std::vector<std::vector<double>>& norms,
                               std::uint64_t seed, int resamples = 1000);

// Quenched Var <phi, X_t> = int_0^t <G_phi(t - s)^2, Z_s> ds for a Gaussian
// bump in d = 1, same frozen-interval convention as quenched_covariance.
double pairing_variance(const CatalystPath& path, const kernels::GaussianBump& phi, double t, double kappa);

// Periodic spectral sampler for the squared L2 norm of X_t.
struct SpectralBox {
  double length = 8.0;
  int modes = 1024;  // real Fourier modes, cos and sin counted separately
  double min_weight = 1e-9;  // drop modes whose weight over an interval is below this
};

// Each (interval, endpoint state, particle) triple contributes one Brownian
// increment of variance (mass / 2) * width, spread over the Fourier modes with
// weights sqrt(mean over the interval of exp(-2 kappa xi^2 (t - s))). The
// noise is wrapped onto the box, so the box must be wide compared to the
// catalyst's spread plus sqrt(kappa t).
double sample_l2_norm_squared(const CatalystPath& path, double t, double kappa, const SpectralBox& box,
                              NormalStream& normal);

// Closed form int_0^t int p(t-s, x, u)^2 dx ds for a single unit atom, d = 1
// and the matching squared Hilbert-Schmidt norm of its covariance operator.
double atom_trace(double t, double kappa);
double atom_hilbert_schmidt_sq(double t, double kappa);

// replica,time,mode_or_point,value
void write_samples_csv(std::ostream& os, const Eigen::MatrixXd& samples, double t);
// header is written for replica 0 only, so replicas can be appended
void write_eigen_field_csv(std::ostream& os, const EigenField& f, std::size_t replica = 0);
std::string covariance_metadata_json(const QuenchedCovariance& cov);

}  // namespace catou::field
