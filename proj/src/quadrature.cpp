#include "catou/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace catou {

namespace {

bool accepted(const QuadResult& r, const QuadOptions& opt) {
  return std::isfinite(r.value) && r.error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(r.value));
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt) {
  if (a == b) return {};
  if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("integrate: NaN bound");
  QuadResult r;
  // boost stops on the relative tolerance; the absolute floor is applied in
  // the acceptance test below
  r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, opt.max_depth, opt.rel_tol, &r.error);
  r.converged = accepted(r, opt);
  return r;
}

QuadResult integrate_singular(const std::function<double(double)>& f, double a, double b,
                              const QuadOptions& opt) {
  if (a == b) return {};
  if (!(a < b)) throw std::invalid_argument("integrate_singular: need a < b");
  // one rule per refinement depth; building the abscissa tables is the expensive part
  thread_local std::map<unsigned, boost::math::quadrature::tanh_sinh<double>> rules;
  auto& rule = rules.try_emplace(opt.max_depth, opt.max_depth).first->second;
  QuadResult r;
  double l1 = 0.0;
  try {
    r.value = rule.integrate(f, a, b, opt.rel_tol, &r.error, &l1);
  } catch (const std::domain_error&) {
    r.value = std::numeric_limits<double>::quiet_NaN();
    r.error = std::numeric_limits<double>::infinity();
  }
  r.converged = accepted(r, opt);
  return r;
}

}  // namespace catou
