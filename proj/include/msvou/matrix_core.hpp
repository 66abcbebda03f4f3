#pragma once

#include <Eigen/Dense>
#include <complex>
#include <type_traits>

#include "msvou/errors.hpp"

namespace msvou {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

inline constexpr double tol_spec = 1e-12;  // spectral-condition tolerance
inline constexpr double tol_num = 1e-10;   // generic round-trip tolerance

double spectral_norm(const Mat& X);
bool is_symmetric(const Mat& X, double tol = 1e-9);
Mat symmetrize(const Mat& X);

// PSD tolerance scales with the matrix: eigenvalues >= -1e-10 * ||X||_2 pass.
double psd_tol(const Mat& X);
bool is_psd(const Mat& X);

// Clips eigenvalues in [-psd_tol, 0) to zero; below that raises NotPSDError.
Mat psd_clip(const Mat& X);

// Symmetric PSD square root; input must be symmetric PSD up to psd_tol.
Mat psd_sqrt(const Mat& X);

// Mean-reversion matrix A together with its cached spectrum and the operator
//   𝐀 : X -> A X + X A^T     (adjoint flag: A^T X + X A).
// Construction validates 0 ∉ σ(A)+σ(A), which is equivalent to 𝐀 being
// invertible. Solves go through the d²×d² system on vec(X).
class MeanReversion {
 public:
  explicit MeanReversion(Mat A);

  int dim() const { return static_cast<int>(A_.rows()); }
  const Mat& matrix() const { return A_; }
  const CVec& eigenvalues() const { return eig_; }
  double norm() const { return norm_; }            // spectral norm of A
  double inv_op_norm() const { return inv_norm_; }  // ||𝐀^{-1}|| on vec coords

  // e^{At}; exact group law e^{A(s+t)} = e^{As} e^{At} up to tol_num.
  Mat expm(double t) const;

  Mat apply(const Mat& X, bool adjoint = false) const;
  CMat apply(const CMat& X, bool adjoint = false) const;
  Mat solve(const Mat& Y, bool adjoint = false) const;
  CMat solve(const CMat& Y, bool adjoint = false) const;

  // Expression arguments evaluate first, then dispatch on the scalar type
  // (otherwise both concrete overloads are viable and the call is ambiguous).
  template <class Derived>
  auto apply(const Eigen::MatrixBase<Derived>& X, bool adjoint = false) const {
    if constexpr (std::is_same_v<typename Derived::Scalar, cplx>) {
      return apply(CMat(X.derived()), adjoint);
    } else {
      return apply(Mat(X.derived()), adjoint);
    }
  }
  template <class Derived>
  auto solve(const Eigen::MatrixBase<Derived>& Y, bool adjoint = false) const {
    if constexpr (std::is_same_v<typename Derived::Scalar, cplx>) {
      return solve(CMat(Y.derived()), adjoint);
    } else {
      return solve(Mat(Y.derived()), adjoint);
    }
  }

 private:
  Mat A_;
  CVec eig_;
  CMat V_, Vinv_;        // eigenbasis, used by expm when well conditioned
  bool use_eigen_expm_;  // false -> scaling-and-squaring fallback
  Eigen::PartialPivLU<Mat> lu_, lu_adj_;
  double norm_, inv_norm_;
};

// ∫_0^t e^{As} X e^{A^T s} ds = 𝐀^{-1}(e^{At} X e^{A^T t} - X); with
// adjoint=true the integrand is e^{A^T s} X e^{A s}.
Mat ou_gram(const MeanReversion& A, const Mat& X, double t, bool adjoint = false);

}  // namespace msvou
