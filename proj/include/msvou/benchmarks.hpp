#pragma once

#include <random>
#include <utility>

#include "msvou/matrix_core.hpp"

namespace msvou {

// Benchmark 1: two variance-gamma legs driven by a single common Gamma
// clock (one nu), martingale-adjusted per leg.
struct VGCommonParams {
  double theta1, theta2;
  double sigma1, sigma2;
  double nu;
  double r_dom, r_for1, r_for2;
};

// E[e^{y1 Y1_t + y2 Y2_t}]; DomainError when the Gamma argument leaves the
// principal branch at the real part.
cplx vg_common_mgf(const VGCommonParams& p, cplx y1, cplx y2, double t);

// Exact terminal draw (Y1, Y2).
std::pair<double, double> vg_common_sample(const VGCommonParams& p, double t,
                                           std::mt19937_64& rng);

// Benchmark 2: two independent VG legs sharing a Gamma-OU integrated
// activity clock z (dz = 2 alpha z ds + dN_{-2 alpha s}, z_0 = 1, N
// compound Poisson with intensity vartheta and Exp(xi) jumps), normalized
// so each discounted leg is a martingale.
struct VGGOUParams {
  double theta1, theta2;
  double sigma1, sigma2;
  double nu1, nu2;
  double vartheta, alpha, xi;  // alpha < 0
  double r_dom, r_for1, r_for2;
};

// MGF of the integrated clock Z_t = int_0^t z_s ds.
cplx vggou_clock_mgf(const VGGOUParams& p, cplx y, double t);

cplx vggou_mgf(const VGGOUParams& p, cplx y1, cplx y2, double t);

std::pair<double, double> vggou_sample(const VGGOUParams& p, double t,
                                       std::mt19937_64& rng);

}  // namespace msvou
