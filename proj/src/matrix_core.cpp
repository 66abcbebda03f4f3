#include "msvou/matrix_core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace msvou {

double spectral_norm(const Mat& X) {
  if (X.size() == 0) return 0.0;
  return X.jacobiSvd().singularValues()(0);
}

bool is_symmetric(const Mat& X, double tol) {
  if (X.rows() != X.cols()) return false;
  const double scale = std::max(1.0, X.cwiseAbs().maxCoeff());
  return (X - X.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

Mat symmetrize(const Mat& X) { return 0.5 * (X + X.transpose()); }

double psd_tol(const Mat& X) { return 1e-10 * spectral_norm(X); }

bool is_psd(const Mat& X) {
  if (!is_symmetric(X)) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(X), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -psd_tol(X);
}

Mat psd_clip(const Mat& X) {
  if (!is_symmetric(X)) throw ShapeError("psd_clip: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(X));
  Vec ev = es.eigenvalues();
  const double tol = psd_tol(X);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol)
      throw NotPSDError("psd_clip: eigenvalue " + std::to_string(ev(i)) +
                        " below tolerance " + std::to_string(-tol));
    if (ev(i) < 0.0) ev(i) = 0.0;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Mat psd_sqrt(const Mat& X) {
  if (!is_symmetric(X)) throw ShapeError("psd_sqrt: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(X));
  Vec ev = es.eigenvalues();
  const double tol = psd_tol(X);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol)
      throw NotPSDError("psd_sqrt: eigenvalue " + std::to_string(ev(i)) +
                        " below tolerance " + std::to_string(-tol));
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

// vec is column-major, so vec(AX + XA^T) = (I ⊗ A + A ⊗ I) vec(X).
Mat sylvester_vec_matrix(const Mat& A) {
  const Eigen::Index d = A.rows();
  Mat M = Mat::Zero(d * d, d * d);
  for (Eigen::Index j = 0; j < d; ++j) M.block(j * d, j * d, d, d) = A;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index i = 0; i < d; ++i) M(j * d + i, k * d + i) += A(j, k);
  return M;
}

}  // namespace

MeanReversion::MeanReversion(Mat A) : A_(std::move(A)) {
  if (A_.rows() != A_.cols() || A_.rows() < 1)
    throw ShapeError("MeanReversion: matrix must be square");
  if (!A_.allFinite()) throw NumericError("MeanReversion: non-finite entries");

  Eigen::EigenSolver<Mat> es(A_);
  if (es.info() != Eigen::Success)
    throw NumericError("MeanReversion: eigendecomposition failed");
  eig_ = es.eigenvalues();
  V_ = es.eigenvectors();

  norm_ = spectral_norm(A_);
  const double scale = std::max(1.0, norm_);
  for (Eigen::Index i = 0; i < eig_.size(); ++i)
    for (Eigen::Index j = 0; j < eig_.size(); ++j)
      if (std::abs(eig_(i) + eig_(j)) <= tol_spec * scale)
        throw SingularOperatorError(
            "MeanReversion: eigenvalue pair sums to zero; operator 𝐀 is "
            "singular");

  // Eigen-expm only if the eigenbasis is well conditioned.
  Eigen::JacobiSVD<CMat> vsvd(V_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cond =
      vsvd.singularValues()(0) / vsvd.singularValues()(vsvd.singularValues().size() - 1);
  use_eigen_expm_ = std::isfinite(cond) && cond < 1e8;
  if (use_eigen_expm_) Vinv_ = V_.inverse();

  const Mat M = sylvester_vec_matrix(A_);
  const Mat Madj = sylvester_vec_matrix(Mat(A_.transpose()));
  lu_.compute(M);
  lu_adj_.compute(Madj);
  inv_norm_ = 1.0 / M.jacobiSvd().singularValues().minCoeff();
}

Mat MeanReversion::expm(double t) const {
  if (!std::isfinite(t)) throw NumericError("expm: t must be finite");
  const Eigen::Index d = A_.rows();
  Mat E(d, d);
  if (use_eigen_expm_) {
    CVec phase(d);
    for (Eigen::Index i = 0; i < d; ++i) phase(i) = std::exp(eig_(i) * t);
    E = (V_ * phase.asDiagonal() * Vinv_).real();
  } else {
    E = (A_ * t).exp();
  }
  if (!E.allFinite()) throw NumericError("expm: overflow in matrix exponential");
  return E;
}

Mat MeanReversion::apply(const Mat& X, bool adjoint) const {
  if (X.rows() != A_.rows() || X.cols() != A_.cols())
    throw ShapeError("sylvester apply: dimension mismatch");
  if (adjoint) return A_.transpose() * X + X * A_;
  return A_ * X + X * A_.transpose();
}

CMat MeanReversion::apply(const CMat& X, bool adjoint) const {
  if (X.rows() != A_.rows() || X.cols() != A_.cols())
    throw ShapeError("sylvester apply: dimension mismatch");
  if (adjoint) return A_.transpose() * X + X * A_;
  return A_ * X + X * A_.transpose();
}

Mat MeanReversion::solve(const Mat& Y, bool adjoint) const {
  if (Y.rows() != A_.rows() || Y.cols() != A_.cols())
    throw ShapeError("sylvester solve: dimension mismatch");
  const Eigen::Index d = A_.rows();
  Eigen::Map<const Vec> y(Y.data(), d * d);
  Vec x = adjoint ? lu_adj_.solve(y) : lu_.solve(y);
  return Eigen::Map<const Mat>(x.data(), d, d);
}

CMat MeanReversion::solve(const CMat& Y, bool adjoint) const {
  // The vec system is real; solve real and imaginary parts separately.
  const Mat xr = solve(Mat(Y.real()), adjoint);
  const Mat xi = solve(Mat(Y.imag()), adjoint);
  return xr.cast<cplx>() + cplx(0.0, 1.0) * xi.cast<cplx>();
}

Mat ou_gram(const MeanReversion& A, const Mat& X, double t, bool adjoint) {
  const Mat E = A.expm(t);
  if (adjoint) return A.solve(Mat(E.transpose() * X * E - X), true);
  return A.solve(Mat(E * X * E.transpose() - X), false);
}

}  // namespace msvou
