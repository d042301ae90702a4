#include "catou/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "catou/quadrature.hpp"

namespace catou {

void HeatKernelParams::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("kernel: kappa must be positive");
  if (d < 1) throw std::invalid_argument("kernel: dimension must be >= 1");
  if (!(stable_index > 0.0 && stable_index <= 2.0))
    throw std::invalid_argument("kernel: stable index must lie in (0, 2]");
}

namespace kernels {

using std::numbers::pi;

double heat_kernel(double t, std::span<const double> x, std::span<const double> y,
                   const HeatKernelParams& params) {
  params.validate();
  if (!(t > 0.0)) throw std::domain_error("heat_kernel: t must be positive");
  if (params.stable_index != 2.0)
    throw std::invalid_argument("heat_kernel: pointwise density only for the Gaussian case");
  if (x.size() != static_cast<std::size_t>(params.d) || y.size() != x.size())
    throw std::invalid_argument("heat_kernel: point dimension mismatch");
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - y[i]) * (x[i] - y[i]);
  const double s = 4.0 * params.kappa * t;
  return std::pow(pi * s, -0.5 * params.d) * std::exp(-r2 / s);
}

double heat_kernel(double t, double x, double y, double kappa) {
  if (!(t > 0.0)) throw std::domain_error("heat_kernel: t must be positive");
  const double s = 4.0 * kappa * t;
  return std::exp(-(x - y) * (x - y) / s) / std::sqrt(pi * s);
}

std::size_t PeriodicGrid::size() const {
  std::size_t s = 1;
  for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

PeriodicGrid PeriodicGrid::padded(double a, double b, double kappa, double t_max, int n, int d) {
  if (!(b > a)) throw std::invalid_argument("PeriodicGrid::padded: empty interval");
  const double pad = 6.0 * std::sqrt(kappa * std::max(t_max, 0.0));
  return {d, n, a - pad, (b - a) + 2.0 * pad};
}

GridFunction GridFunction::constant(const PeriodicGrid& g, double c) {
  return {g, std::vector<double>(g.size(), c)};
}

GridFunction GridFunction::sample(const PeriodicGrid& g, const std::function<double(double)>& f) {
  if (g.d != 1) throw std::invalid_argument("GridFunction::sample: grid is not one-dimensional");
  GridFunction r{g, std::vector<double>(g.size())};
  for (int i = 0; i < g.n; ++i) r.values[i] = f(g.coord(i));
  return r;
}

GridFunction GridFunction::sample2(const PeriodicGrid& g,
                                   const std::function<double(double, double)>& f) {
  if (g.d != 2) throw std::invalid_argument("GridFunction::sample2: grid is not two-dimensional");
  GridFunction r{g, std::vector<double>(g.size())};
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) r.values[static_cast<std::size_t>(i) * g.n + j] = f(g.coord(i), g.coord(j));
  return r;
}

// FFTW planning is not thread safe, execution with the new-array interface
// is. Plans are made once per (d, n) with FFTW_ESTIMATE, so the chosen
// codelets and hence the results do not depend on timing.
struct SpectralPropagator::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

namespace {

std::mutex plan_mu;

SpectralPropagator::Plans* shared_plans(int d, int n, std::size_t nreal, std::size_t ncomplex);

}  // namespace

SpectralPropagator::SpectralPropagator(const PeriodicGrid& grid, const HeatKernelParams& params)
    : grid_(grid) {
  params.validate();
  if (grid.d != 1 && grid.d != 2) throw std::invalid_argument("SpectralPropagator: d must be 1 or 2");
  if (grid.n < 4 || grid.n % 2 != 0) throw std::invalid_argument("SpectralPropagator: n must be even and >= 4");
  if (!(grid.length > 0.0)) throw std::invalid_argument("SpectralPropagator: non-positive length");
  const int n = grid.n, h = n / 2 + 1;
  const double k0 = 2.0 * pi / grid.length;
  auto sym = [&](double xi2) { return params.kappa * std::pow(xi2, 0.5 * params.stable_index); };
  if (grid.d == 1) {
    symbol_.resize(h);
    for (int j = 0; j < h; ++j) symbol_[j] = sym(k0 * j * k0 * j);
  } else {
    symbol_.resize(static_cast<std::size_t>(n) * h);
    for (int i = 0; i < n; ++i) {
      const int fi = i <= n / 2 ? i : i - n;
      for (int j = 0; j < h; ++j)
        symbol_[static_cast<std::size_t>(i) * h + j] = sym(k0 * k0 * (double(fi) * fi + double(j) * j));
    }
  }
  real_ = static_cast<double*>(fftw_malloc(sizeof(double) * grid.size()));
  spec_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * symbol_.size()));
  if (!real_ || !spec_) throw std::bad_alloc();
  plans_ = shared_plans(grid.d, n, grid.size(), symbol_.size());
}

SpectralPropagator::~SpectralPropagator() {
  fftw_free(real_);
  fftw_free(spec_);
}

void SpectralPropagator::forward(std::span<const double> field, std::span<std::complex<double>> out) {
  if (field.size() != grid_.size() || out.size() != symbol_.size())
    throw std::invalid_argument("SpectralPropagator::forward: size mismatch");
  std::copy(field.begin(), field.end(), real_);
  fftw_execute_dft_r2c(plans_->r2c, real_, reinterpret_cast<fftw_complex*>(spec_));
  std::copy(spec_, spec_ + symbol_.size(), out.begin());
}

void SpectralPropagator::backward(std::span<const std::complex<double>> in, std::span<double> field) {
  if (field.size() != grid_.size() || in.size() != symbol_.size())
    throw std::invalid_argument("SpectralPropagator::backward: size mismatch");
  std::copy(in.begin(), in.end(), spec_);
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(spec_), real_);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t i = 0; i < field.size(); ++i) field[i] = real_[i] * scale;
}

void SpectralPropagator::apply(std::span<double> field, double t) {
  if (t < 0.0) throw std::domain_error("apply_semigroup: negative time");
  if (field.size() != grid_.size()) throw std::invalid_argument("apply_semigroup: size mismatch");
  if (t == 0.0) return;
  std::copy(field.begin(), field.end(), real_);
  fftw_execute_dft_r2c(plans_->r2c, real_, reinterpret_cast<fftw_complex*>(spec_));
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t j = 0; j < symbol_.size(); ++j) spec_[j] *= std::exp(-t * symbol_[j]) * scale;
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(spec_), real_);
  std::copy(real_, real_ + field.size(), field.begin());
}

namespace {

SpectralPropagator::Plans* shared_plans(int d, int n, std::size_t nreal, std::size_t ncomplex) {
  static std::map<std::pair<int, int>, SpectralPropagator::Plans> cache;
  std::lock_guard lk(plan_mu);
  auto& p = cache[{d, n}];
  if (!p.r2c) {
    auto* r = static_cast<double*>(fftw_malloc(sizeof(double) * nreal));
    auto* c = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ncomplex));
    if (d == 1) {
      p.r2c = fftw_plan_dft_r2c_1d(n, r, c, FFTW_ESTIMATE);
      p.c2r = fftw_plan_dft_c2r_1d(n, c, r, FFTW_ESTIMATE);
    } else {
      p.r2c = fftw_plan_dft_r2c_2d(n, n, r, c, FFTW_ESTIMATE);
      p.c2r = fftw_plan_dft_c2r_2d(n, n, c, r, FFTW_ESTIMATE);
    }
    fftw_free(r);
    fftw_free(c);
    if (!p.r2c || !p.c2r) throw std::runtime_error("fftw planning failed");
  }
  return &p;
}

}  // namespace

GridFunction apply_semigroup(const GridFunction& field, double t, const HeatKernelParams& params) {
  if (t < 0.0) throw std::domain_error("apply_semigroup: negative time");
  if (field.values.size() != field.grid.size())
    throw std::invalid_argument("apply_semigroup: values do not match grid");
  GridFunction out = field;
  SpectralPropagator prop(field.grid, params);
  prop.apply(out.values, t);
  return out;
}

double g_phi(const TestFunction& phi, double t, double s, double z, const HeatKernelParams& params) {
  params.validate();
  if (!(s < t)) throw std::domain_error("g_phi: need s < t");
  if (params.d != 1) throw std::invalid_argument("g_phi: one-dimensional test functions only");
  const double tau = t - s;
  const double w = 12.0 * std::sqrt(2.0 * params.kappa * tau);
  const double a = std::max(phi.lo, z - w), b = std::min(phi.hi, z + w);
  if (!(a < b)) return 0.0;
  QuadOptions opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-10;
  auto f = [&](double x) { return heat_kernel(tau, x, z, params.kappa) * phi.f(x); };
  // split at z so the kernel peak sits on a panel boundary
  double v = 0.0;
  if (a < z && z < b)
    v = integrate(f, a, z, opt).value + integrate(f, z, b, opt).value;
  else
    v = integrate(f, a, b, opt).value;
  return v;
}

double GaussianBump::operator()(double x) const {
  const double u = (x - center) / width;
  return amplitude * std::exp(-0.5 * u * u);
}

double GaussianBump::smoothed(double tau, double z, double kappa) const {
  const double v = width * width + 2.0 * kappa * tau;
  return amplitude * width / std::sqrt(v) * std::exp(-0.5 * (z - center) * (z - center) / v);
}

TestFunction GaussianBump::as_test_function() const {
  const GaussianBump b = *this;
  return {[b](double x) { return b(x); }, center - 40.0 * width, center + 40.0 * width};
}

double EigenSystem::mode(int k, double x) const {
  if (d != 1) throw std::invalid_argument("EigenSystem::mode: scalar point needs d = 1");
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::numbers::sqrt2 * std::sin(indices[k][0] * pi * x);
}

double EigenSystem::mode(int k, std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(d)) throw std::invalid_argument("EigenSystem::mode: dimension mismatch");
  double v = 1.0;
  for (int a = 0; a < d; ++a) {
    if (x[a] <= 0.0 || x[a] >= 1.0) return 0.0;
    v *= std::numbers::sqrt2 * std::sin(indices[k][a] * pi * x[a]);
  }
  return v;
}

EigenSystem dirichlet_eigensystem(int d, double kappa, int K) {
  if (d != 1 && d != 2) throw std::invalid_argument("dirichlet_eigensystem: unsupported dimension");
  if (K < 1) throw std::invalid_argument("dirichlet_eigensystem: K must be >= 1");
  if (!(kappa > 0.0)) throw std::invalid_argument("dirichlet_eigensystem: kappa must be positive");
  EigenSystem e{d, kappa, K, {}, {}};
  if (d == 1) {
    for (int j = 1; j <= K; ++j) {
      e.indices.push_back({j, 0});
      e.lambdas.push_back(kappa * (j * pi) * (j * pi));
    }
    return e;
  }
  // every (j, k) with j^2 + k^2 <= r2 where r2 is large enough to hold K modes
  std::vector<std::array<int, 2>> cand;
  int r = static_cast<int>(std::ceil(std::sqrt(4.0 * K / pi))) + 2;
  for (;;) {
    cand.clear();
    for (int j = 1; j <= r; ++j)
      for (int k = 1; k <= r; ++k)
        if (j * j + k * k <= r * r) cand.push_back({j, k});
    if (static_cast<int>(cand.size()) >= K) break;
    ++r;
  }
  std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
    const int la = a[0] * a[0] + a[1] * a[1], lb = b[0] * b[0] + b[1] * b[1];
    return std::tie(la, a) < std::tie(lb, b);
  });
  cand.resize(K);
  for (const auto& c : cand) {
    e.indices.push_back(c);
    e.lambdas.push_back(kappa * pi * pi * (c[0] * c[0] + c[1] * c[1]));
  }
  return e;
}

}  // namespace kernels
}  // namespace catou
