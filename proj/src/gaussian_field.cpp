#include "catou/gaussian_field.hpp"

#include <algorithm>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>

#include "catou/quadrature.hpp"
#include "json.hpp"

namespace catou::field {

using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string sci(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double e1(double x) { return x == kInf ? 0.0 : boost::math::expint(1, x); }

// int_{tau0}^{tau1} tau^{-d} exp(-c / tau) dtau
double power_exp_integral(double c, double tau0, double tau1, int d) {
  if (!(tau1 > tau0)) return 0.0;
  if (c == 0.0) {
    if (tau0 == 0.0) return kInf;
    return d == 1 ? std::log(tau1 / tau0) : (std::pow(tau0, 1 - d) - std::pow(tau1, 1 - d)) / (d - 1);
  }
  const double a = c / tau1, b = tau0 > 0.0 ? c / tau0 : kInf;
  if (d == 1) return e1(a) - e1(b);
  if (d == 2) return b == kInf ? std::exp(-a) / c : -std::exp(-a) * std::expm1(a - b) / c;
  const double hi = b == kInf ? 0.0 : boost::math::tgamma(d - 1.0, b);
  return std::pow(c, 1 - d) * (boost::math::tgamma(d - 1.0, a) - hi);
}

struct Interval {
  double tau0, tau1;   // t - b, t - a
  std::size_t left;    // states[left], states[left + 1]
};

std::vector<Interval> intervals_up_to(const CatalystPath& path, double t) {
  if (path.times.size() < 2) throw std::invalid_argument("catalyst path needs at least two record times");
  if (t > path.horizon() * (1 + 1e-12)) throw std::invalid_argument("evaluation time beyond the path horizon");
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < path.times.size() && path.times[i] < t; ++i) {
    const double b = std::min(path.times[i + 1], t);
    out.push_back({std::max(t - b, 0.0), t - path.times[i], i});
  }
  return out;
}

}  // namespace

double kernel_product_integral(std::span<const double> x, std::span<const double> y, std::span<const double> u,
                               double tau0, double tau1, double kappa) {
  const int d = static_cast<int>(x.size());
  double c = 0.0;
  for (int a = 0; a < d; ++a) {
    const double dxy = x[a] - y[a], mu = 0.5 * (x[a] + y[a]) - u[a];
    c += 0.25 * dxy * dxy + mu * mu;
  }
  c /= 2.0 * kappa;
  return std::pow(4.0 * pi * kappa, -d) * power_exp_integral(c, tau0, tau1, d);
}

QuenchedCovariance quenched_covariance(const CatalystPath& path, std::span<const double> points, double t,
                                       double kappa, Exec exec) {
  if (!(kappa > 0.0)) throw std::invalid_argument("quenched_covariance: kappa must be positive");
  const int d = path.d;
  if (points.size() % d != 0) throw std::invalid_argument("quenched_covariance: ragged points");
  QuenchedCovariance cov;
  cov.d = d;
  cov.points.assign(points.begin(), points.end());
  cov.t = t;
  cov.kappa = kappa;
  cov.path_seed = path.seed;
  cov.path_stream = path.stream;
  const std::size_t p = cov.size();
  cov.gamma = Eigen::MatrixXd::Zero(p, p);
  if (t <= 0.0 || p == 0) return cov;
  const auto iv = intervals_up_to(path, t);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) pairs.emplace_back(i, j);
  std::vector<double> vals(pairs.size());
  for_each_index(
      pairs.size(),
      [&](std::size_t q) {
        const auto [i, j] = pairs[q];
        const std::span<const double> x{cov.points.data() + i * d, static_cast<std::size_t>(d)};
        const std::span<const double> y{cov.points.data() + j * d, static_cast<std::size_t>(d)};
        double s = 0.0;
        for (const auto& in : iv)
          for (std::size_t e = in.left; e <= in.left + 1; ++e) {
            const auto& st = path.states[e];
            double part = 0.0;
            for (std::size_t k = 0; k < st.count(); ++k)
              part += kernel_product_integral(x, y, st.at(k), in.tau0, in.tau1, kappa);
            s += 0.5 * st.mass_per_particle * part;
          }
        vals[q] = s;
      },
      exec);
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const auto [i, j] = pairs[q];
    cov.gamma(i, j) = cov.gamma(j, i) = vals[q];
    if (std::isinf(vals[q])) cov.divergent = true;
  }
  return cov;
}

GaussianFactor::GaussianFactor(const Eigen::MatrixXd& c, double jitter) : n_(c.rows()) {
  if (c.rows() != c.cols()) throw std::invalid_argument("GaussianFactor: matrix is not square");
  if (!c.allFinite()) throw ConditioningError("GaussianFactor: covariance has non-finite entries");
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff()))
    throw ConditioningError("GaussianFactor: covariance is not symmetric");
  const double tr = c.trace();
  if (tr < 0.0) throw ConditioningError("GaussianFactor: negative trace");
  if (tr == 0.0) {
    if (c.cwiseAbs().maxCoeff() != 0.0) throw ConditioningError("GaussianFactor: zero trace, nonzero matrix");
    zero_ = true;
    return;
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(c);
  const Eigen::VectorXd dvec = ldlt.vectorD();
  if (ldlt.info() == Eigen::Success && dvec.minCoeff() >= -jitter * tr) {
    sqrt_d_ = dvec.cwiseMax(0.0).cwiseSqrt();
    lower_ = ldlt.matrixL();
    perm_ = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic>(ldlt.transpositionsP());
    return;
  }
  // LDLT pivots go badly negative on numerically rank-deficient matrices; the
  // eigendecomposition does not.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  if (es.info() != Eigen::Success) throw ConditioningError("GaussianFactor: eigendecomposition failed");
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < -jitter * tr)
    throw ConditioningError(sci("GaussianFactor: eigenvalue %.3e exceeds the PSD repair budget (trace %.3e)", lmin, tr));
  dense_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

void GaussianFactor::apply(const Eigen::VectorXd& g, Eigen::VectorXd& out) const {
  if (zero_) {
    out = Eigen::VectorXd::Zero(n_);
    return;
  }
  if (dense_.size() != 0) {
    out = dense_ * g;
    return;
  }
  const Eigen::VectorXd y = lower_.triangularView<Eigen::UnitLower>() * sqrt_d_.cwiseProduct(g);
  out = perm_.transpose() * y;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream) : g_(seed, stream) {}

double NormalStream::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(g_.uniform())), th = 2.0 * pi * g_.uniform();
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

Eigen::MatrixXd sample_quenched_field(const QuenchedCovariance& cov, std::size_t replicas, std::uint64_t seed,
                                      std::uint64_t stream, Exec exec) {
  if (cov.divergent) throw ConditioningError("sample_quenched_field: covariance has divergent entries");
  const GaussianFactor f(cov.gamma);
  const Eigen::Index p = cov.gamma.rows();
  Eigen::MatrixXd out(replicas, p);
  for_each_index(
      replicas,
      [&](std::size_t r) {
        NormalStream z(seed, stream_id(static_cast<std::uint32_t>(stream), r));
        Eigen::VectorXd g(p), x;
        for (Eigen::Index i = 0; i < p; ++i) g[i] = z();
        f.apply(g, x);
        out.row(r) = x.transpose();
      },
      exec);
  return out;
}

namespace {

// <phi_j phi_k, Z> at each record time, computed on demand
class NodeMoments {
public:
  NodeMoments(const CatalystPath& path, const kernels::EigenSystem& eig) : path_(path), eig_(eig) {
    if (path.d != eig.d) throw std::invalid_argument("eigen covariance: path and eigensystem dimensions differ");
  }

  const Eigen::MatrixXd& node(std::size_t i) {
    auto it = cache_.find(i);
    if (it != cache_.end()) return it->second;
    const auto& st = path_.states[i];
    const int K = eig_.K;
    Eigen::MatrixXd phi(st.count(), K);
    for (std::size_t p = 0; p < st.count(); ++p)
      for (int k = 0; k < K; ++k) phi(p, k) = eig_.mode(k, st.at(p));
    Eigen::MatrixXd m = st.mass_per_particle * (phi.transpose() * phi);
    // record times are visited in increasing order
    if (i >= 2) cache_.erase(cache_.begin(), cache_.lower_bound(i - 2));
    return cache_.emplace(i, std::move(m)).first->second;
  }

  Eigen::MatrixXd at(double s) {
    const auto& t = path_.times;
    if (s <= t.front()) return node(0);
    if (s >= t.back()) return node(t.size() - 1);
    const std::size_t i = std::upper_bound(t.begin(), t.end(), s) - t.begin() - 1;
    const double th = (s - t[i]) / (t[i + 1] - t[i]);
    if (th == 0.0) return node(i);
    return (1.0 - th) * node(i) + th * node(i + 1);
  }

private:
  const CatalystPath& path_;
  const kernels::EigenSystem& eig_;
  std::map<std::size_t, Eigen::MatrixXd> cache_;
};

// (1 - e^{-x}(1 + x)) / x^2 and (x - 1 + e^{-x}) / x^2
void linear_weights(double x, double& wa, double& wb) {
  if (x < 1e-3) {
    wb = 0.5 - x / 6 + x * x / 24 - x * x * x / 120;
    wa = 0.5 - x / 3 + x * x / 8 - x * x * x / 30;
    return;
  }
  const double em = std::exp(-x);
  wa = (1.0 - em * (1.0 + x)) / (x * x);
  wb = (x - 1.0 + em) / (x * x);
}

Eigen::MatrixXd step_covariance(NodeMoments& nm, const CatalystPath& path, const kernels::EigenSystem& eig,
                                double t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("eigen_step_covariance: h must be positive");
  if (t < path.times.front() - 1e-12 || t + h > path.horizon() * (1 + 1e-12))
    throw std::invalid_argument("eigen_step_covariance: [t, t + h] outside the path horizon");
  const int K = eig.K;
  std::vector<double> br{t};
  for (double s : path.times)
    if (s > t && s < t + h) br.push_back(s);
  br.push_back(t + h);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(K, K);
  Eigen::MatrixXd ma = nm.at(br[0]);
  for (std::size_t q = 0; q + 1 < br.size(); ++q) {
    Eigen::MatrixXd mb = nm.at(br[q + 1]);
    const double delta = br[q + 1] - br[q], wend = t + h - br[q + 1];
    for (int j = 0; j < K; ++j)
      for (int k = 0; k <= j; ++k) {
        const double lam = eig.lambdas[j] + eig.lambdas[k];
        double wa, wb;
        linear_weights(lam * delta, wa, wb);
        c(j, k) += std::exp(-lam * wend) * delta * (wa * ma(j, k) + wb * mb(j, k));
      }
    ma = std::move(mb);
  }
  return c.selfadjointView<Eigen::Lower>();
}

}  // namespace

Eigen::MatrixXd eigen_step_covariance(const CatalystPath& path, const kernels::EigenSystem& eig, double t,
                                      double h) {
  NodeMoments nm(path, eig);
  return step_covariance(nm, path, eig, t, h);
}

Eigen::VectorXd EigenField::at(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return coeffs.row(i).transpose();
  throw std::invalid_argument("EigenField: time not on the sampling grid");
}

double EigenField::value(double t, std::span<const double> x) const {
  const Eigen::VectorXd a = at(t);
  double v = 0.0;
  for (int k = 0; k < eig.K; ++k) v += a[k] * eig.mode(k, x);
  return v;
}

EigenField sample_eigen_path(const CatalystPath& path, const kernels::EigenSystem& eig, std::span<const double> times,
                             std::uint64_t seed, std::uint64_t stream) {
  if (times.empty()) throw std::invalid_argument("sample_eigen_path: empty time grid");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("sample_eigen_path: times must increase");
  EigenField f;
  f.times.assign(times.begin(), times.end());
  f.eig = eig;
  const int K = eig.K;
  f.coeffs = Eigen::MatrixXd::Zero(times.size(), K);
  NodeMoments nm(path, eig);
  NormalStream z(seed, stream);
  Eigen::VectorXd g(K), inc;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double h = times[i + 1] - times[i];
    const GaussianFactor fac(step_covariance(nm, path, eig, times[i], h));
    for (int k = 0; k < K; ++k) g[k] = z();
    fac.apply(g, inc);
    for (int k = 0; k < K; ++k) f.coeffs(i + 1, k) = std::exp(-eig.lambdas[k] * h) * f.coeffs(i, k) + inc[k];
  }
  return f;
}

SobolevNorm sobolev_norm(std::span<const double> coeffs, const kernels::EigenSystem& eig, double n) {
  if (!(n > 0.5 * eig.d))
    throw std::invalid_argument("sobolev_norm: order must exceed d/2, otherwise sum (1 + lambda_k)^{-n} diverges");
  if (coeffs.size() != static_cast<std::size_t>(eig.K)) throw std::invalid_argument("sobolev_norm: need K coefficients");
  SobolevNorm r;
  double s = 0.0;
  for (int k = 0; k < eig.K; ++k) s += coeffs[k] * coeffs[k] * std::pow(1.0 + eig.lambdas[k], -n);
  r.value = std::sqrt(s);
  const double lam_k = eig.lambdas.back();
  if (eig.d == 1) {
    const double c = eig.kappa * pi * pi;
    r.tail_factor = integrate([&](double x) { return std::pow(1.0 + c * x * x, -n); }, eig.K, kInf).value;
  } else {
    r.tail_factor = std::pow(1.0 + lam_k, 1.0 - n) / ((n - 1.0) * 4.0 * pi * eig.kappa);
  }
  return r;
}

SobolevNorm sobolev_norm(const EigenField& f, double t, double n) {
  const Eigen::VectorXd a = f.at(t);
  return sobolev_norm(std::span<const double>(a.data(), a.size()), f.eig, n);
}

HolderEstimate holder_estimate(std::span<const double> lags, const std::vector<std::vector<double>>& norms,
                               std::uint64_t seed, int resamples) {
  if (lags.size() < 4 || norms.size() != lags.size())
    throw std::invalid_argument("holder_estimate: need at least 4 lag levels with matching samples");
  for (const auto& v : norms)
    if (v.size() < 100) throw std::invalid_argument("holder_estimate: need at least 100 increments per level");
  HolderEstimate r;
  r.lags.assign(lags.begin(), lags.end());
  std::vector<double> lx, ly;
  for (std::size_t l = 0; l < lags.size(); ++l) {
    double m = 0.0;
    for (double v : norms[l]) m += v;
    m /= static_cast<double>(norms[l].size());
    r.mean_norms.push_back(m);
    if (!(m > 0.0) || !(lags[l] > 0.0)) {
      r.defined = false;
      r.slope = r.intercept = std::numeric_limits<double>::quiet_NaN();
      return r;
    }
    lx.push_back(std::log(lags[l]));
    ly.push_back(std::log(m));
  }
  const auto fit = stats::least_squares(lx, ly);
  r.slope = fit.slope;
  r.intercept = fit.intercept;
  Philox4x32 g(seed, 0x401D);
  std::vector<double> slopes(resamples), by(lags.size());
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t l = 0; l < lags.size(); ++l) {
      const auto& v = norms[l];
      double m = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i)
        m += v[std::min(v.size() - 1, static_cast<std::size_t>(g.uniform() * v.size()))];
      by[l] = std::log(std::max(m / v.size(), std::numeric_limits<double>::min()));
    }
    slopes[b] = stats::least_squares(lx, by).slope;
  }
  r.ci = {stats::quantile(slopes, 0.025), stats::quantile(slopes, 0.975)};
  return r;
}

double pairing_variance(const CatalystPath& path, const kernels::GaussianBump& phi, double t, double kappa) {
  if (path.d != 1) throw std::invalid_argument("pairing_variance: d = 1 only");
  if (t <= 0.0) return 0.0;
  const double w2 = phi.width * phi.width;
  const double pref = phi.amplitude * phi.amplitude * w2 / (2.0 * kappa);
  double s = 0.0;
  for (const auto& in : intervals_up_to(path, t)) {
    const double v0 = w2 + 2.0 * kappa * in.tau0, v1 = w2 + 2.0 * kappa * in.tau1;
    for (std::size_t e = in.left; e <= in.left + 1; ++e) {
      const auto& st = path.states[e];
      double part = 0.0;
      for (double u : st.positions) {
        const double dd = (u - phi.center) * (u - phi.center);
        part += dd == 0.0 ? std::log(v1 / v0) : e1(dd / v1) - e1(dd / v0);
      }
      s += 0.5 * st.mass_per_particle * part;
    }
  }
  return pref * s;
}

double sample_l2_norm_squared(const CatalystPath& path, double t, double kappa, const SpectralBox& box,
                              NormalStream& normal) {
  if (path.d != 1) throw std::invalid_argument("sample_l2_norm_squared: d = 1 only");
  if (box.modes < 3 || !(box.length > 0.0)) throw std::invalid_argument("sample_l2_norm_squared: bad box");
  const int kmax = box.modes / 2;
  std::vector<double> x0(1, 0.0), xc(kmax + 1, 0.0), xs(kmax + 1, 0.0), w(kmax + 1);
  const double c0 = 1.0 / std::sqrt(box.length), c1 = std::sqrt(2.0 / box.length);
  for (const auto& in : intervals_up_to(path, t)) {
    const double delta = in.tau1 - in.tau0;
    if (delta <= 0.0) continue;
    int cut = 0;
    w[0] = 1.0;
    for (int k = 1; k <= kmax; ++k) {
      const double xi = 2.0 * pi * k / box.length, r = 2.0 * kappa * xi * xi;
      const double wk2 = std::exp(-r * in.tau0) * (-std::expm1(-r * delta)) / (r * delta);
      if (std::sqrt(wk2) < box.min_weight) break;
      w[k] = std::sqrt(wk2);
      cut = k;
    }
    for (std::size_t e = in.left; e <= in.left + 1; ++e) {
      const auto& st = path.states[e];
      const double scale = std::sqrt(0.5 * st.mass_per_particle * delta);
      for (double u : st.positions) {
        const double a = scale * normal();
        x0[0] += a * c0;
        const double th = 2.0 * pi * u / box.length, ct = std::cos(th), sn = std::sin(th);
        double ck = 1.0, sk = 0.0;
        for (int k = 1; k <= cut; ++k) {
          const double nc = ck * ct - sk * sn;
          sk = sk * ct + ck * sn;
          ck = nc;
          xc[k] += a * w[k] * c1 * ck;
          xs[k] += a * w[k] * c1 * sk;
        }
      }
    }
  }
  double s = x0[0] * x0[0];
  for (int k = 1; k <= kmax; ++k) s += xc[k] * xc[k] + xs[k] * xs[k];
  return s;
}

double atom_trace(double t, double kappa) { return 2.0 * std::sqrt(t) / std::sqrt(8.0 * pi * kappa); }

double atom_hilbert_schmidt_sq(double t, double kappa) { return 2.0 * std::numbers::ln2 * t / (4.0 * pi * kappa); }

void write_samples_csv(std::ostream& os, const Eigen::MatrixXd& samples, double t) {
  os << "replica,time,mode_or_point,value\n";
  os.precision(17);
  for (Eigen::Index r = 0; r < samples.rows(); ++r)
    for (Eigen::Index j = 0; j < samples.cols(); ++j) os << r << ',' << t << ',' << j << ',' << samples(r, j) << '\n';
}

void write_eigen_field_csv(std::ostream& os, const EigenField& f, std::size_t replica) {
  if (replica == 0) os << "replica,time,mode_or_point,value\n";
  os.precision(17);
  for (std::size_t i = 0; i < f.times.size(); ++i)
    for (int k = 0; k < f.eig.K; ++k) os << replica << ',' << f.times[i] << ',' << k << ',' << f.coeffs(i, k) << '\n';
}

std::string covariance_metadata_json(const QuenchedCovariance& cov) {
  nlohmann::ordered_json j;
  j["t"] = cov.t;
  j["kappa"] = cov.kappa;
  j["d"] = cov.d;
  j["points"] = cov.points;
  j["path_seed"] = cov.path_seed;
  j["path_stream"] = cov.path_stream;
  j["divergent"] = cov.divergent;
  return j.dump(2);
}

}  // namespace catou::field
