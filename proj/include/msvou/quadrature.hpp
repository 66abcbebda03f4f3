#pragma once

#include <complex>
#include <functional>

#include "msvou/errors.hpp"

namespace msvou {

struct QuadResult {
  std::complex<double> value{0.0, 0.0};
  double error = 0.0;  // accumulated rule-error estimate
  long evals = 0;
};

// Adaptive Gauss-Kronrod 15(7) on [a, b] (a > b allowed) to an absolute
// tolerance. Subdivides the worst segment until the summed error estimate
// drops below abs_tol; exceeding max_evals raises QuadratureError.
QuadResult integrate_gk(const std::function<std::complex<double>(double)>& f,
                        double a, double b, double abs_tol, long max_evals);

QuadResult integrate_gk_real(const std::function<double(double)>& f, double a,
                             double b, double abs_tol, long max_evals);

}  // namespace msvou
