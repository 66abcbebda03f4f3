#pragma once

#include <complex>

namespace msvou {

// Gamma function on the complex plane (Lanczos approximation with
// reflection for Re z < 1/2). Accurate to ~1e-13 relative away from poles.
std::complex<double> cgamma(std::complex<double> z);

// log(1 + z) without cancellation for small |z|.
std::complex<double> clog1p(std::complex<double> z);

// Standard normal CDF.
double norm_cdf(double x);

}  // namespace msvou
