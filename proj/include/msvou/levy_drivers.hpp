#pragma once

#include <optional>
#include <random>

#include "msvou/matrix_core.hpp"

namespace msvou {

// Compound-Poisson jump component: intensity lambda, jump law W_d(n, Theta).
struct WishartJumpSpec {
  double lambda;
  double n;
  Mat theta;

  WishartJumpSpec(double lambda_, double n_, Mat theta_);
  int dim() const { return static_cast<int>(theta.rows()); }
};

// Matrix subordinator L_t = gamma * t + compound-Poisson Wishart jumps.
// gamma is a PSD drift; the jump part is optional (lambda = 0 case).
struct SubordinatorSpec {
  Mat gamma;
  std::optional<WishartJumpSpec> jumps;

  SubordinatorSpec(Mat gamma_, std::optional<WishartJumpSpec> jumps_);
  int dim() const { return static_cast<int>(gamma.rows()); }

  // Largest argument norm with a guaranteed exponential moment along the
  // symmetric-matrix ray family: 1 / (2 ||Theta||_2); +inf without jumps.
  double eps_moment() const;
};

// Exact existence predicate for the cumulant at matrix argument Z: every
// real eigenvalue of (Re Z) * Theta must lie strictly below 1/2. Complex
// eigenvalue pairs never pinch the determinant on the real segment, so only
// real ones constrain. Always true without jumps.
bool in_moment_domain(const SubordinatorSpec& spec, const CMat& Z);

// Jump cumulant lambda * (det(I - 2 Z Theta)^{-n/2} - 1). Raises
// OutOfStripError outside the moment domain and BranchError if the
// determinant lands on the principal-log cut.
cplx jump_cumulant(const WishartJumpSpec& spec, const CMat& Z);

// Full cumulant tr(gamma Z) + jump part; psi(0) == 0.
cplx cumulant(const SubordinatorSpec& spec, const CMat& Z);

// E L_1 = gamma + lambda * n * Theta.
Mat subordinator_mean(const SubordinatorSpec& spec);

// Second-moment data of a single Wishart jump (d = 2 convenience covs plus
// the general raw matrix E[X_ii X_jj]).
struct JumpMoments {
  Mat mean;              // n Theta
  Mat raw_diag_second;   // E[X_ii X_jj] = n (2 Theta_ij^2 + n Theta_ii Theta_jj)
  double cov11_12 = 0.0; // Cov(X_11, X_12) = 2 n Theta_11 Theta_12   (d = 2)
  double cov22_12 = 0.0; // Cov(X_22, X_12) = 2 n Theta_22 Theta_12   (d = 2)
  double cov11_22 = 0.0; // Cov(X_11, X_22) = 2 n Theta_12^2          (d = 2)
};
JumpMoments jump_moments(const WishartJumpSpec& spec);

// One W_d(n, Theta) draw via sqrt(Theta) X X^T sqrt(Theta), X a d x n
// standard Gaussian matrix. Integer n only; otherwise
// UnsupportedSamplingError.
Mat sample_jump(const WishartJumpSpec& spec, std::mt19937_64& rng);

}  // namespace msvou
