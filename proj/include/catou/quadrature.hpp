#pragma once

#include <functional>

namespace catou {

struct QuadOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-7;
  unsigned max_depth = 18;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

// Adaptive Gauss-Kronrod (15-point). Either bound may be infinite.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

// Double-exponential rule for integrands with endpoint singularities such as
// (t-s)^{-1/2}. The endpoints themselves are never evaluated.
QuadResult integrate_singular(const std::function<double(double)>& f, double a, double b,
                              const QuadOptions& opt = {});

}  // namespace catou
