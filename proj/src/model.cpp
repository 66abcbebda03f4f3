#include "msvou/model.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/SVD>

#include "msvou/quadrature.hpp"

namespace msvou {

LinOpToVec LinOpToVec::diagonal(Vec coeffs) {
  LinOpToVec op;
  op.diagonal_ = true;
  op.d_ = static_cast<int>(coeffs.size());
  if (op.d_ == 0) throw ShapeError("empty coefficient vector");
  op.coeffs_ = std::move(coeffs);
  op.rows_.reserve(op.d_);
  for (int i = 0; i < op.d_; ++i) {
    Mat R = Mat::Zero(op.d_, op.d_);
    R(i, i) = op.coeffs_(i);
    op.rows_.push_back(std::move(R));
  }
  op.norm_ = op.coeffs_.cwiseAbs().maxCoeff();
  return op;
}

LinOpToVec LinOpToVec::general(std::vector<Mat> rows) {
  LinOpToVec op;
  op.diagonal_ = false;
  op.d_ = static_cast<int>(rows.size());
  if (op.d_ == 0) throw ShapeError("empty row list");
  for (const Mat& R : rows) {
    if (R.rows() != op.d_ || R.cols() != op.d_) {
      throw ShapeError("row coefficient matrices must be d x d");
    }
  }
  op.rows_ = std::move(rows);
  Mat stack(op.d_, op.d_ * op.d_);
  for (int i = 0; i < op.d_; ++i) {
    stack.row(i) = Eigen::Map<const Vec>(op.rows_[i].data(), op.d_ * op.d_);
  }
  Eigen::JacobiSVD<Mat> svd(stack);
  op.norm_ = svd.singularValues()(0);
  return op;
}

const Vec& LinOpToVec::diag_coeffs() const {
  if (!diagonal_) throw ShapeError("operator is not diagonal");
  return coeffs_;
}

Vec LinOpToVec::apply(const Mat& X) const {
  if (X.rows() != d_ || X.cols() != d_) throw ShapeError("argument must be d x d");
  Vec out(d_);
  for (int i = 0; i < d_; ++i) out(i) = (rows_[i] * X).trace();
  return out;
}

Mat LinOpToVec::adjoint(const Vec& y) const {
  if (y.size() != d_) throw ShapeError("argument must have length d");
  Mat out = Mat::Zero(d_, d_);
  for (int i = 0; i < d_; ++i) out += y(i) * rows_[i];
  return out;
}

CMat LinOpToVec::adjoint(const CVec& y) const {
  if (y.size() != d_) throw ShapeError("argument must have length d");
  CMat out = CMat::Zero(d_, d_);
  for (int i = 0; i < d_; ++i) out += y(i) * rows_[i];
  return out;
}

ModelParams::ModelParams(Vec mu_, MeanReversion A_, LinOpToVec beta_,
                         LinOpToVec rho_, Mat Sigma0_, Vec Y0_,
                         SubordinatorSpec sub_)
    : mu(std::move(mu_)),
      A(std::move(A_)),
      beta(std::move(beta_)),
      rho(std::move(rho_)),
      Sigma0(std::move(Sigma0_)),
      Y0(std::move(Y0_)),
      sub(std::move(sub_)) {
  const int d = static_cast<int>(mu.size());
  if (d == 0) throw ShapeError("model dimension must be positive");
  if (A.dim() != d || beta.dim() != d || rho.dim() != d || Y0.size() != d ||
      Sigma0.rows() != d || Sigma0.cols() != d || sub.dim() != d) {
    throw ShapeError("model parameter dimensions disagree");
  }
  if (!is_symmetric(Sigma0)) throw ShapeError("Sigma0 must be symmetric");
  if (!is_psd(Sigma0)) throw NotPSDError("Sigma0 must be PSD");
}

namespace {

// Q solving A^T Q + Q A = beta*(y) + y y^T / 2.
CMat transform_Q(const ModelParams& p, const CVec& y) {
  const CMat rhs = p.beta.adjoint(y) + 0.5 * (y * y.transpose());
  return p.A.solve(rhs, /*adjoint=*/true);
}

}  // namespace

CMat transform_H(const ModelParams& p, const CVec& y, double s) {
  if (y.size() != p.dim()) throw ShapeError("argument must have length d");
  const CMat Q = transform_Q(p, y);
  const Mat E = p.A.expm(s);
  return E.transpose() * Q * E - Q;
}

StripInfo strip_radius(const ModelParams& p, double t) {
  if (!(t >= 0.0)) throw DomainError("t must be non-negative");
  StripInfo info;
  info.t = t;
  info.eps = p.sub.eps_moment();
  if (std::isinf(info.eps)) {
    info.theta = std::numeric_limits<double>::infinity();
    return info;
  }
  const double grow = std::exp(2.0 * p.A.norm() * t) + 1.0;
  const double c2 = 0.5 * grow * p.A.inv_op_norm();
  const double c1 = p.rho.norm() + grow * p.A.inv_op_norm() * p.beta.norm();
  if (!std::isfinite(c2)) {
    info.theta = std::numeric_limits<double>::min();
    return info;
  }
  info.theta = (-c1 + std::sqrt(c1 * c1 + 4.0 * c2 * info.eps)) / (2.0 * c2);
  return info;
}

cplx log_transform(const ModelParams& p, const CVec& y, const CMat& V, double t,
                   double abs_tol, long max_evals) {
  const int d = p.dim();
  if (y.size() != d) throw ShapeError("argument must have length d");
  if (V.rows() != d || V.cols() != d) throw ShapeError("V must be d x d");
  if (!(t >= 0.0)) throw DomainError("t must be non-negative");

  const CMat Q = transform_Q(p, y);
  const CMat C = V + Q;
  const CMat rho_adj = p.rho.adjoint(y);

  // Eigen's dot conjugates the left factor; accumulate the bilinear form.
  cplx head(0.0, 0.0);
  for (int i = 0; i < d; ++i) head += y(i) * (p.Y0(i) + p.mu(i) * t);

  if (t == 0.0) {
    return head + (p.Sigma0.cast<cplx>() * V).trace();
  }

  const Mat Et = p.A.expm(t);
  const CMat Kt = Et.transpose() * C * Et - Q;
  head += (p.Sigma0.cast<cplx>() * Kt).trace();

  const bool has_jumps = p.sub.jumps.has_value();
  const Mat gamma = p.sub.gamma;
  auto integrand = [&](double s) -> cplx {
    const Mat E = p.A.expm(s);
    const CMat K = E.transpose() * C * E - Q;
    cplx v = (gamma.cast<cplx>() * K).trace();
    if (has_jumps) v += jump_cumulant(*p.sub.jumps, K + rho_adj);
    return v;
  };
  const QuadResult q = integrate_gk(integrand, 0.0, t, abs_tol, max_evals);
  return head + q.value;
}

cplx mgf_unchecked(const ModelParams& p, const CVec& y, double t) {
  return std::exp(log_transform(p, y, CMat::Zero(p.dim(), p.dim()), t));
}

cplx mgf(const ModelParams& p, const CVec& y, double t) {
  const StripInfo strip = strip_radius(p, t);
  const double re_norm = y.real().norm();
  if (!(re_norm < strip.theta)) {
    throw OutOfStripError("Re y outside the guaranteed strip");
  }
  return mgf_unchecked(p, y, t);
}

cplx joint_cf(const ModelParams& p, const Vec& y, const Mat& z, double t) {
  if (!is_symmetric(z)) throw ShapeError("z must be symmetric");
  const cplx I(0.0, 1.0);
  return std::exp(log_transform(p, I * y.cast<cplx>(), I * z.cast<cplx>(), t));
}

bool mgf_in_domain(const ModelParams& p, const Vec& y, double t, int grid) {
  if (!p.sub.jumps) return true;
  const CVec yc = y.cast<cplx>();
  const CMat Q = transform_Q(p, yc);
  const CMat rho_adj = p.rho.adjoint(yc);
  for (int k = 0; k <= grid; ++k) {
    const double s = t * static_cast<double>(k) / grid;
    const Mat E = p.A.expm(s);
    const CMat K = E.transpose() * Q * E - Q;
    if (!in_moment_domain(p.sub, K + rho_adj)) return false;
  }
  return true;
}

Vec martingale_mu(const ModelParams& p, double r_dom, const Vec& r_for) {
  const int d = p.dim();
  if (r_for.size() != d) throw ShapeError("r_for must have length d");
  if (!p.beta.is_diagonal()) {
    throw MartingaleInfeasibleError("beta must be the -1/2 diagonal map");
  }
  const Vec& c = p.beta.diag_coeffs();
  for (int i = 0; i < d; ++i) {
    if (std::abs(c(i) + 0.5) > 1e-12) {
      throw MartingaleInfeasibleError("beta must be the -1/2 diagonal map");
    }
  }
  Vec mu(d);
  for (int i = 0; i < d; ++i) {
    double comp = 0.0;
    if (p.sub.jumps) {
      Vec ei = Vec::Zero(d);
      ei(i) = 1.0;
      const CMat Zi = p.rho.adjoint(ei).cast<cplx>();
      if (!in_moment_domain(p.sub, Zi)) {
        throw MartingaleInfeasibleError(
            "no exponential moment at the leverage of asset " +
            std::to_string(i + 1));
      }
      comp = jump_cumulant(*p.sub.jumps, Zi).real();
    }
    mu(i) = (r_dom - r_for(i)) - comp;
  }
  return mu;
}

Mat decay_matrix(const ModelParams& p, double t) {
  if (!(t >= 0.0)) throw DomainError("t must be non-negative");
  const Mat first = ou_gram(p.A, p.Sigma0, t);
  const Mat E = p.A.expm(t);
  const Mat Bg = E * p.sub.gamma * E.transpose() - p.sub.gamma;
  const Mat inner = p.A.solve(Bg) - t * p.sub.gamma;
  const Mat second = p.A.solve(inner);
  return symmetrize(first + second);
}

}  // namespace msvou
