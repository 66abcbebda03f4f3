#include "msvou/special_functions.hpp"

#include <cmath>

namespace msvou {

namespace {

using cd = std::complex<double>;

// Lanczos g = 7, nine coefficients.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,    -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,  12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2Pi = 2.50662827463100050242;

}  // namespace

cd cgamma(cd z) {
  if (z.real() < 0.5) {
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    return kPi / (std::sin(kPi * z) * cgamma(1.0 - z));
  }
  z -= 1.0;
  cd x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const cd t = z + kLanczosG + 0.5;
  return kSqrt2Pi * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

cd clog1p(cd z) {
  const cd w = 1.0 + z;
  if (w == cd(1.0, 0.0)) return z;
  if (w.real() <= 0.0 && w.imag() == 0.0) {
    // Principal log is about to hit the cut; defer to std::log semantics.
    return std::log(w);
  }
  // Correct the rounding committed in forming 1 + z.
  const cd d = w - 1.0;
  if (d == cd(0.0, 0.0)) return std::log(w);
  return std::log(w) * (z / d);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / 1.41421356237309504880); }

}  // namespace msvou
