#pragma once

#include "msvou/model.hpp"

namespace msvou {

// Two-asset specialization: A = diag(a1, a2), beta_i(X) = -X_ii / 2,
// leverage rho(X) = (rho1 X_11 + rho12 X_12, rho2 X_22 + rho21 X_12),
// subordinator drift diag(gamma1, gamma2), Wishart jumps W_2(n, Theta).
struct OUW2Params {
  double a1 = -1.0, a2 = -1.0;
  double rho1 = 0.0, rho2 = 0.0, rho12 = 0.0, rho21 = 0.0;
  double gamma1 = 0.0, gamma2 = 0.0;
  double lambda = 0.0;  // 0 disables jumps
  double n = 2.0;
  Mat Theta;   // 2 x 2 PSD (ignored when lambda == 0)
  Mat Sigma0;  // 2 x 2 positive definite
  double r_dom = 0.0, r_for1 = 0.0, r_for2 = 0.0;
  Vec Y0;      // defaults to 0
  Vec mu;      // empty => derived from fx_drifts

  // Validates and fills defaulted members (Y0, mu).
  static OUW2Params make(OUW2Params raw);
  bool has_jumps() const { return lambda > 0.0; }
};

// Martingale drifts (mu1, mu2) under the domestic money market account:
//   mu_i = (r_dom - r_for_i) - lambda (D_i^{-n/2} - 1),
//   D_1 = 1 - 2 rho1 Theta11 - 2 rho12 Theta12 (and symmetrically for 2).
// D_i <= 0 raises MartingaleInfeasibleError.
std::pair<double, double> fx_drifts(const OUW2Params& p);

// Quadratic det(I - 2 (H_y(s) + rho*(y)) Theta) = b0 + b1 x + b2 x^2 in
// x = e^{2 a s}; only defined when a1 == a2 (WrongBranchError otherwise).
struct MGFCoefficients {
  cplx b0, b1, b2;
  cplx Delta;  // sqrt(4 b0 b2 - b1^2), principal branch
  CMat B;      // M(y) Theta / (4a)
  CMat C;      // rho*(y) Theta
};
MGFCoefficients mgf_coefficients(const OUW2Params& p, const CVec& y);

// Closed-form joint MGF E[e^{y . Y_t}]; requires a1 == a2 and n == 2
// (WrongBranchError otherwise). Branch-safe via log1p root tracking; a
// quadratic root on the integration segment raises BranchError, vanishing
// b0 raises DegenerateCoefficientError.
cplx mgf2_closed(const OUW2Params& p, const CVec& y, double t);

// Closed-form marginal MGF of Y^asset (asset in {1, 2}); any a_i, n == 2.
cplx mgf1_closed(const OUW2Params& p, int asset, cplx y, double t);

// Dispatcher: closed form when available, otherwise the quadrature
// transform of the embedded general model. Checks the exact existence
// domain of Re y first (OutOfStripError when outside).
cplx mgf2(const OUW2Params& p, const CVec& y, double t);
cplx mgf1(const OUW2Params& p, int asset, cplx y, double t);

// Exact existence predicates at real dampings.
bool mgf2_in_domain(const OUW2Params& p, const Vec& re_y, double t);
bool mgf1_in_domain(const OUW2Params& p, int asset, double re_y, double t);

// Conservative strip radius for the marginal ray y = x e_asset, from the
// one-dimensional reduction of the strip bound (uses the full Theta norm
// and the Frobenius norm of the leverage row).
double marginal_strip_theta(const OUW2Params& p, int asset, double t);

// Embed into the general-d representation (quadrature paths, MC, swaps).
ModelParams to_model_params(const OUW2Params& p);

}  // namespace msvou
