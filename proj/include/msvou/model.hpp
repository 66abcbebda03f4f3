#pragma once

#include <vector>

#include "msvou/levy_drivers.hpp"
#include "msvou/matrix_core.hpp"

namespace msvou {

// Linear map R: S_d -> R^d, component i given by X |-> tr(R_i X).
// The adjoint R*(y) = sum_i y_i R_i is kept without symmetrization; the
// analytic stack pairs it with plain determinants, which matches the
// closed forms used downstream. Diagonal kind: R_i = c_i e_i e_i^T, so
// R(X)_i = c_i X_ii and R*(y) = diag(c_i y_i).
class LinOpToVec {
 public:
  static LinOpToVec diagonal(Vec coeffs);
  static LinOpToVec general(std::vector<Mat> rows);

  int dim() const { return d_; }
  bool is_diagonal() const { return diagonal_; }
  const Vec& diag_coeffs() const;
  const std::vector<Mat>& rows() const { return rows_; }

  Vec apply(const Mat& X) const;
  Mat adjoint(const Vec& y) const;
  CMat adjoint(const CVec& y) const;

  // Operator norm, Frobenius on inputs to Euclidean on outputs: the largest
  // singular value of the d x d^2 coordinate matrix (rows vec(R_i)^T).
  double norm() const { return norm_; }

 private:
  LinOpToVec() = default;
  bool diagonal_ = false;
  int d_ = 0;
  Vec coeffs_;
  std::vector<Mat> rows_;
  double norm_ = 0.0;
};

struct ModelParams {
  Vec mu;
  MeanReversion A;
  LinOpToVec beta;
  LinOpToVec rho;
  Mat Sigma0;
  Vec Y0;
  SubordinatorSpec sub;

  ModelParams(Vec mu_, MeanReversion A_, LinOpToVec beta_, LinOpToVec rho_,
              Mat Sigma0_, Vec Y0_, SubordinatorSpec sub_);
  int dim() const { return static_cast<int>(mu.size()); }
};

struct StripInfo {
  double theta;  // guaranteed strip radius (Euclidean), may be +inf
  double eps;    // moment bound used, may be +inf
  double t;
};

// H_y(s) = e^{A^T s} Q e^{A s} - Q with Q = inv-Sylvester-adjoint of
// (beta*(y) + y y^T / 2).
CMat transform_H(const ModelParams& p, const CVec& y, double s);

// Conservative strip radius: positive root of
//   c2 x^2 + c1 x - eps,   c2 = (e^{2||A|| t} + 1) ||inv A||_op / 2,
//   c1 = ||rho|| + (e^{2||A|| t} + 1) ||inv A||_op ||beta||,
// with spectral norm for A, Euclidean-Frobenius induced norms for the
// operators; +inf when eps is +inf.
StripInfo strip_radius(const ModelParams& p, double t);

// log E[exp(y . Y_t + tr(V Sigma_t))], evaluated by exact Gaussian algebra
// plus adaptive quadrature of the subordinator cumulant along s. Domain is
// enforced pointwise by the cumulant itself (OutOfStripError outside).
cplx log_transform(const ModelParams& p, const CVec& y, const CMat& V, double t,
                   double abs_tol = 1e-11, long max_evals = 32768);

// Moment generating function E[e^{y . Y_t}]; gated by the conservative
// strip: ||Re y|| >= theta raises OutOfStripError before any evaluation.
cplx mgf(const ModelParams& p, const CVec& y, double t);

// Ungated variant used by pricing layers, which check the exact domain.
cplx mgf_unchecked(const ModelParams& p, const CVec& y, double t);

// Joint characteristic function E[exp(i y . Y_t + i tr(z Sigma_t))] for real
// y, symmetric real z; always defined.
cplx joint_cf(const ModelParams& p, const Vec& y, const Mat& z, double t);

// Exact existence predicate for E[e^{y . Y_t}] at real y: the cumulant
// argument H_y(s) + rho*(y) must stay in the jump moment domain for all
// s in [0, t] (checked on a refined grid plus the quadrature itself).
bool mgf_in_domain(const ModelParams& p, const Vec& y, double t, int grid = 64);

// Risk-neutral drift making e^{-(r - r_for_i) t} S^i_t a martingale.
// Requires beta_i(X) = -X_ii / 2 and an exponential moment at rho*(e_i);
// violations raise MartingaleInfeasibleError.
Vec martingale_mu(const ModelParams& p, double r_dom, const Vec& r_for);

// PSD matrix M(t) of the Gaussian envelope
//   |Phi(R + iu)| <= Phi(R) exp(-u^T M u / 2).
Mat decay_matrix(const ModelParams& p, double t);

}  // namespace msvou
