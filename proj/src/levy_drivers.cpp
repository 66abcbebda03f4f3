#include "msvou/levy_drivers.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Eigenvalues>

namespace msvou {

WishartJumpSpec::WishartJumpSpec(double lambda_, double n_, Mat theta_)
    : lambda(lambda_), n(n_), theta(std::move(theta_)) {
  if (theta.rows() != theta.cols()) throw ShapeError("theta must be square");
  const int d = static_cast<int>(theta.rows());
  if (!(lambda > 0.0)) throw DomainError("jump intensity must be positive");
  if (!(n > d - 1)) throw DomainError("Wishart degrees must exceed d - 1");
  if (!is_symmetric(theta)) throw ShapeError("theta must be symmetric");
  if (!is_psd(theta)) throw NotPSDError("theta must be PSD");
}

SubordinatorSpec::SubordinatorSpec(Mat gamma_,
                                   std::optional<WishartJumpSpec> jumps_)
    : gamma(std::move(gamma_)), jumps(std::move(jumps_)) {
  if (gamma.rows() != gamma.cols()) throw ShapeError("gamma must be square");
  if (!is_symmetric(gamma)) throw ShapeError("gamma must be symmetric");
  if (!is_psd(gamma)) throw NotPSDError("gamma must be PSD");
  if (jumps && jumps->dim() != dim()) {
    throw ShapeError("gamma and theta dimensions disagree");
  }
}

double SubordinatorSpec::eps_moment() const {
  if (!jumps) return std::numeric_limits<double>::infinity();
  const double nrm = spectral_norm(jumps->theta);
  if (nrm == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 / nrm;
}

namespace {

// Real eigenvalues of the (generally non-symmetric) real matrix M, treating
// eigenvalues with negligible imaginary part as real.
double max_real_eigenvalue(const Mat& M) {
  Eigen::EigenSolver<Mat> es(M, false);
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < M.rows(); ++i) {
    const cplx ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) <= 1e-9 * std::max(1.0, std::abs(ev))) {
      best = std::max(best, ev.real());
    }
  }
  return best;
}

}  // namespace

bool in_moment_domain(const SubordinatorSpec& spec, const CMat& Z) {
  if (!spec.jumps) return true;
  if (Z.rows() != spec.dim() || Z.cols() != spec.dim()) {
    throw ShapeError("argument dimension mismatch");
  }
  const Mat re = Z.real();
  return max_real_eigenvalue(re * spec.jumps->theta) < 0.5;
}

cplx jump_cumulant(const WishartJumpSpec& spec, const CMat& Z) {
  const int d = spec.dim();
  if (Z.rows() != d || Z.cols() != d) {
    throw ShapeError("argument dimension mismatch");
  }
  if (max_real_eigenvalue(Z.real() * spec.theta) >= 0.5) {
    throw OutOfStripError("jump cumulant argument outside moment domain");
  }
  const CMat G = CMat::Identity(d, d) - 2.0 * Z * spec.theta;
  const cplx det = G.determinant();
  const double scale = std::max(1.0, std::abs(det));
  if (det.real() <= 0.0 && std::abs(det.imag()) <= 1e-14 * scale) {
    throw BranchError("determinant on the principal-log cut");
  }
  return spec.lambda * (std::exp(-0.5 * spec.n * std::log(det)) - 1.0);
}

cplx cumulant(const SubordinatorSpec& spec, const CMat& Z) {
  if (Z.rows() != spec.dim() || Z.cols() != spec.dim()) {
    throw ShapeError("argument dimension mismatch");
  }
  cplx out = (spec.gamma * Z).trace();
  if (spec.jumps) out += jump_cumulant(*spec.jumps, Z);
  return out;
}

Mat subordinator_mean(const SubordinatorSpec& spec) {
  Mat m = spec.gamma;
  if (spec.jumps) m += spec.jumps->lambda * spec.jumps->n * spec.jumps->theta;
  return m;
}

JumpMoments jump_moments(const WishartJumpSpec& spec) {
  const int d = spec.dim();
  const Mat& th = spec.theta;
  const double n = spec.n;
  JumpMoments jm;
  jm.mean = n * th;
  jm.raw_diag_second.resize(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      jm.raw_diag_second(i, j) = n * (2.0 * th(i, j) * th(i, j) + n * th(i, i) * th(j, j));
    }
  }
  if (d == 2) {
    jm.cov11_12 = 2.0 * n * th(0, 0) * th(0, 1);
    jm.cov22_12 = 2.0 * n * th(1, 1) * th(0, 1);
    jm.cov11_22 = 2.0 * n * th(0, 1) * th(0, 1);
  }
  return jm;
}

Mat sample_jump(const WishartJumpSpec& spec, std::mt19937_64& rng) {
  const double n_round = std::round(spec.n);
  if (std::abs(spec.n - n_round) > 1e-9 || n_round < 1.0) {
    throw UnsupportedSamplingError("Wishart sampling requires integer degrees");
  }
  const int n = static_cast<int>(n_round);
  const int d = spec.dim();
  const Mat root = psd_sqrt(spec.theta);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat X(d, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < d; ++i) X(i, j) = gauss(rng);
  }
  const Mat RX = root * X;
  return RX * RX.transpose();
}

}  // namespace msvou
