#pragma once

#include <array>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace catou {

// Generator kappa * Delta (Gaussian case, stable_index = 2) or the Fourier
// multiplier -kappa |xi|^a otherwise. kappa = 1/2 gives the field generator
// (1/2) Delta, kappa = 1 the super-Brownian generator Delta.
struct HeatKernelParams {
  double kappa = 1.0;
  int d = 1;
  double stable_index = 2.0;

  void validate() const;
};

namespace kernels {

// (4 pi kappa t)^{-d/2} exp(-|x-y|^2 / (4 kappa t)); Gaussian case only.
double heat_kernel(double t, std::span<const double> x, std::span<const double> y,
                   const HeatKernelParams& params);
double heat_kernel(double t, double x, double y, double kappa);

// Uniform periodic grid on [lo, lo + length)^d with n points per axis.
struct PeriodicGrid {
  int d = 1;
  int n = 1024;
  double lo = -10.0;
  double length = 20.0;

  double dx() const { return length / n; }
  std::size_t size() const;
  double coord(int i) const { return lo + i * dx(); }

  // Grid covering [a, b] padded by at least 6 sqrt(kappa t_max) on each side.
  static PeriodicGrid padded(double a, double b, double kappa, double t_max, int n, int d = 1);
};

struct GridFunction {
  PeriodicGrid grid;
  std::vector<double> values;

  static GridFunction constant(const PeriodicGrid& g, double c);
  static GridFunction sample(const PeriodicGrid& g, const std::function<double(double)>& f);
  static GridFunction sample2(const PeriodicGrid& g, const std::function<double(double, double)>& f);
};

// Real-to-complex spectral propagator on a fixed grid. Owns its transform
// buffers; a plan for each grid shape is created once and shared.
class SpectralPropagator {
public:
  SpectralPropagator(const PeriodicGrid& grid, const HeatKernelParams& params);
  ~SpectralPropagator();
  SpectralPropagator(const SpectralPropagator&) = delete;
  SpectralPropagator& operator=(const SpectralPropagator&) = delete;

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t spectral_size() const { return symbol_.size(); }
  // kappa |xi|^a per retained complex coefficient
  const std::vector<double>& symbol() const { return symbol_; }

  // in place: field <- exp(t Delta_a) field
  void apply(std::span<double> field, double t);

  // unnormalised forward transform, and inverse including the 1/n^d factor
  void forward(std::span<const double> field, std::span<std::complex<double>> out);
  void backward(std::span<const std::complex<double>> in, std::span<double> field);

  struct Plans;

private:
  PeriodicGrid grid_;
  std::vector<double> symbol_;
  Plans* plans_;
  double* real_ = nullptr;
  std::complex<double>* spec_ = nullptr;
};

GridFunction apply_semigroup(const GridFunction& field, double t, const HeatKernelParams& params);

// Integrable test function with an effective support [lo, hi].
struct TestFunction {
  std::function<double(double)> f;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

// G_phi(t, s, z) = int p(t - s, x, z) phi(x) dx, d = 1, by adaptive quadrature.
double g_phi(const TestFunction& phi, double t, double s, double z, const HeatKernelParams& params);

// amplitude * exp(-(x - center)^2 / (2 width^2)); its heat-kernel smoothing
// has a closed form, which the Monte-Carlo code uses.
struct GaussianBump {
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;

  double operator()(double x) const;
  // int p(tau, x, z) phi(x) dx, d = 1
  double smoothed(double tau, double z, double kappa) const;
  TestFunction as_test_function() const;
};

struct EigenSystem {
  int d = 1;
  double kappa = 0.5;
  int K = 0;
  std::vector<double> lambdas;               // nondecreasing
  std::vector<std::array<int, 2>> indices;   // (j) or (j, k), 1-based

  // phi_k(x) on [0,1]^d, zero outside
  double mode(int k, std::span<const double> x) const;
  double mode(int k, double x) const;
};

EigenSystem dirichlet_eigensystem(int d, double kappa, int K);

}  // namespace kernels
}  // namespace catou
