#include "msvou/ou_wishart.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "msvou/quadrature.hpp"
#include "msvou/special_functions.hpp"

namespace msvou {

namespace {

constexpr double kA1EqA2Tol = 1e-13;

bool same_a(const OUW2Params& p) {
  return std::abs(p.a1 - p.a2) <=
         kA1EqA2Tol * std::max(std::abs(p.a1), std::abs(p.a2));
}

bool n_is_two(const OUW2Params& p) { return std::abs(p.n - 2.0) <= 1e-12; }

// rho*(y) = [[rho1 y1, rho12 y1], [rho21 y2, rho2 y2]].
CMat rho_adjoint(const OUW2Params& p, const CVec& y) {
  CMat R(2, 2);
  R(0, 0) = p.rho1 * y(0);
  R(0, 1) = p.rho12 * y(0);
  R(1, 0) = p.rho21 * y(1);
  R(1, 1) = p.rho2 * y(1);
  return R;
}

// M(y) = y y^T - diag(y); the -1/2 diagonal beta is baked in.
CMat quad_matrix(const CVec& y) {
  CMat M(2, 2);
  M(0, 0) = y(0) * y(0) - y(0);
  M(0, 1) = y(0) * y(1);
  M(1, 0) = M(0, 1);
  M(1, 1) = y(1) * y(1) - y(1);
  return M;
}

cplx det2(const CMat& X) { return X(0, 0) * X(1, 1) - X(0, 1) * X(1, 0); }

// Stable complex quadratic roots of b2 x^2 + b1 x + b0.
std::pair<cplx, cplx> quadratic_roots(cplx b2, cplx b1, cplx b0) {
  const cplx disc = std::sqrt(b1 * b1 - 4.0 * b2 * b0);
  const double sgn = (std::real(std::conj(b1) * disc) >= 0.0) ? 1.0 : -1.0;
  const cplx qq = -0.5 * (b1 + sgn * disc);
  if (qq == cplx(0.0, 0.0)) {
    // b1 == 0 and disc == 0: double root at the origin.
    return {cplx(0.0, 0.0), cplx(0.0, 0.0)};
  }
  return {qq / b2, b0 / qq};
}

bool root_on_segment(cplx r, double lo, double hi) {
  const double tol = 1e-12 * std::max({1.0, std::abs(r), hi});
  return std::abs(r.imag()) <= tol && r.real() >= lo - tol &&
         r.real() <= hi + tol;
}

// integral of 1 / (x (b2 x^2 + b1 x + b0)) over x in [1, q], mapped back to
// s-time: I = int_0^t det^{-1} ds with x = e^{2 a s}.
cplx jump_time_integral(cplx b0, cplx b1, cplx b2, double a, double t,
                        double q) {
  const double scale = std::max({1.0, std::abs(b0), std::abs(b1), std::abs(b2)});
  const double tol_b = 1e-12 * scale;
  if (std::abs(b0) <= tol_b) {
    throw DegenerateCoefficientError("constant coefficient vanished");
  }
  const double lo = std::min(1.0, q);
  const double hi = std::max(1.0, q);

  if (std::abs(b2) <= tol_b) {
    if (std::abs(b1) <= tol_b) return t / b0;
    const cplx r = -b0 / b1;
    if (root_on_segment(r, lo, hi)) {
      throw BranchError("linear root on the integration segment");
    }
    return t / b0 - clog1p(b1 * (q - 1.0) / (b0 + b1)) / (2.0 * a * b0);
  }

  const auto [r1, r2] = quadratic_roots(b2, b1, b0);
  if (root_on_segment(r1, lo, hi) || root_on_segment(r2, lo, hi)) {
    throw BranchError("quadratic root on the integration segment");
  }
  const cplx L1 = clog1p((q - 1.0) / (1.0 - r1));
  const cplx L2 = clog1p((q - 1.0) / (1.0 - r2));

  const double sep_scale = std::max({1.0, std::abs(r1), std::abs(r2)});
  if (std::abs(r1 - r2) > 1e-6 * sep_scale) {
    const cplx sum = L1 / (b2 * r1 * (r1 - r2)) + L2 / (b2 * r2 * (r2 - r1));
    return t / b0 + sum / (2.0 * a);
  }

  // Nearly coincident roots: uniform form built on log1p(w) with
  // w = (r1 - r2)(q - 1) / ((1 - r1)(q - r2)), using the exact identity
  // L1 - L2 = log1p(w). phi(w) = log1p(w)/w -> 1 removes the 0/0.
  const cplx denom = (1.0 - r1) * (q - r2);
  const cplx w = (r1 - r2) * (q - 1.0) / denom;
  if (std::abs(w) <= 0.5) {
    const cplx phi = (w == cplx(0.0, 0.0)) ? cplx(1.0, 0.0) : clog1p(w) / w;
    const cplx sum = (phi * (q - 1.0) / (denom * r1) - L2 / (r1 * r2)) / b2;
    return t / b0 + sum / (2.0 * a);
  }

  // Uniform form unsafe; integrate the rational integrand directly.
  auto f = [&](double x) { return 1.0 / (x * ((b2 * x + b1) * x + b0)); };
  const QuadResult quad = integrate_gk(f, 1.0, q, 1e-12, 32768);
  return quad.value / (2.0 * a);
}

}  // namespace

OUW2Params OUW2Params::make(OUW2Params raw) {
  if (!(raw.a1 < 0.0) || !(raw.a2 < 0.0)) {
    throw DomainError("mean-reversion rates must be negative");
  }
  if (raw.gamma1 < 0.0 || raw.gamma2 < 0.0) {
    throw NotPSDError("gamma drift entries must be non-negative");
  }
  if (raw.lambda < 0.0) throw DomainError("lambda must be non-negative");
  if (raw.lambda > 0.0) {
    if (raw.Theta.rows() != 2 || raw.Theta.cols() != 2) {
      throw ShapeError("Theta must be 2 x 2");
    }
    if (!is_symmetric(raw.Theta)) throw ShapeError("Theta must be symmetric");
    if (!is_psd(raw.Theta)) throw NotPSDError("Theta must be PSD");
    if (!(raw.n > 1.0)) throw DomainError("Wishart degrees must exceed 1");
  } else if (raw.Theta.size() == 0) {
    raw.Theta = Mat::Zero(2, 2);
  }
  if (raw.Sigma0.rows() != 2 || raw.Sigma0.cols() != 2) {
    throw ShapeError("Sigma0 must be 2 x 2");
  }
  if (!is_symmetric(raw.Sigma0)) throw ShapeError("Sigma0 must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(raw.Sigma0));
  if (!(es.eigenvalues().minCoeff() > 0.0)) {
    throw NotPSDError("Sigma0 must be positive definite");
  }
  if (raw.Y0.size() == 0) {
    raw.Y0 = Vec::Zero(2);
  } else if (raw.Y0.size() != 2) {
    throw ShapeError("Y0 must have length 2");
  }
  if (raw.mu.size() == 0) {
    const auto [m1, m2] = fx_drifts(raw);
    raw.mu = Vec(2);
    raw.mu << m1, m2;
  } else if (raw.mu.size() != 2) {
    throw ShapeError("mu must have length 2");
  }
  return raw;
}

std::pair<double, double> fx_drifts(const OUW2Params& p) {
  double comp1 = 0.0, comp2 = 0.0;
  if (p.lambda > 0.0) {
    const double D1 =
        1.0 - 2.0 * p.rho1 * p.Theta(0, 0) - 2.0 * p.rho12 * p.Theta(0, 1);
    const double D2 =
        1.0 - 2.0 * p.rho2 * p.Theta(1, 1) - 2.0 * p.rho21 * p.Theta(0, 1);
    if (!(D1 > 0.0) || !(D2 > 0.0)) {
      throw MartingaleInfeasibleError(
          "leverage has no exponential moment at unit damping");
    }
    comp1 = p.lambda * (std::pow(D1, -0.5 * p.n) - 1.0);
    comp2 = p.lambda * (std::pow(D2, -0.5 * p.n) - 1.0);
  }
  return {p.r_dom - p.r_for1 - comp1, p.r_dom - p.r_for2 - comp2};
}

MGFCoefficients mgf_coefficients(const OUW2Params& p, const CVec& y) {
  if (y.size() != 2) throw ShapeError("argument must have length 2");
  if (!same_a(p)) {
    throw WrongBranchError("closed form requires a1 == a2");
  }
  const double a = p.a1;
  MGFCoefficients c;
  const CMat theta = p.Theta.cast<cplx>();
  c.B = quad_matrix(y) * theta / (4.0 * a);
  c.C = rho_adjoint(p, y) * theta;
  const cplx trB = c.B.trace();
  const cplx trC = c.C.trace();
  const cplx detB = det2(c.B);
  const CMat BmC = c.B - c.C;
  c.b2 = 4.0 * detB;
  c.b1 = -2.0 * trB - 8.0 * detB + 4.0 * trB * trC - 4.0 * (c.B * c.C).trace();
  c.b0 = 1.0 + 2.0 * BmC.trace() + 4.0 * det2(BmC);
  c.Delta = std::sqrt(4.0 * c.b0 * c.b2 - c.b1 * c.b1);
  return c;
}

cplx mgf2_closed(const OUW2Params& p, const CVec& y, double t) {
  if (y.size() != 2) throw ShapeError("argument must have length 2");
  if (!(t >= 0.0)) throw DomainError("t must be non-negative");
  if (!same_a(p)) throw WrongBranchError("closed form requires a1 == a2");
  if (p.has_jumps() && !n_is_two(p)) {
    throw WrongBranchError("closed form requires n == 2");
  }
  const double a = p.a1;
  const double q = std::exp(2.0 * a * t);

  cplx log_phi(0.0, 0.0);
  for (int i = 0; i < 2; ++i) log_phi += y(i) * (p.Y0(i) + p.mu(i) * t);

  const cplx m11 = y(0) * y(0) - y(0);
  const cplx m12 = y(0) * y(1);
  const cplx m22 = y(1) * y(1) - y(1);
  const double qm1 = std::expm1(2.0 * a * t);
  log_phi += (qm1 / (4.0 * a)) *
             (p.Sigma0(0, 0) * m11 + 2.0 * p.Sigma0(0, 1) * m12 +
              p.Sigma0(1, 1) * m22);
  log_phi += ((qm1 / (2.0 * a) - t) / (4.0 * a)) *
             (p.gamma1 * m11 + p.gamma2 * m22);

  if (p.has_jumps()) {
    const MGFCoefficients c = mgf_coefficients(p, y);
    const cplx I = jump_time_integral(c.b0, c.b1, c.b2, a, t, q);
    log_phi += p.lambda * (I - t);
  }
  return std::exp(log_phi);
}

cplx mgf1_closed(const OUW2Params& p, int asset, cplx y, double t) {
  if (asset != 1 && asset != 2) throw DomainError("asset must be 1 or 2");
  if (!(t >= 0.0)) throw DomainError("t must be non-negative");
  if (p.has_jumps() && !n_is_two(p)) {
    throw WrongBranchError("closed form requires n == 2");
  }
  const double a = (asset == 1) ? p.a1 : p.a2;
  const double gam = (asset == 1) ? p.gamma1 : p.gamma2;
  const double sig0 = (asset == 1) ? p.Sigma0(0, 0) : p.Sigma0(1, 1);
  const double mu = (asset == 1) ? p.mu(0) : p.mu(1);
  const double y0 = (asset == 1) ? p.Y0(0) : p.Y0(1);

  const double q = std::exp(2.0 * a * t);
  const double qm1 = std::expm1(2.0 * a * t);
  const cplx k = (y * y - y) / (4.0 * a);

  cplx log_phi = y * (y0 + mu * t);
  log_phi += sig0 * qm1 * k;
  log_phi += gam * k * (qm1 / (2.0 * a) - t);

  if (p.has_jumps()) {
    const double th_d = (asset == 1) ? p.Theta(0, 0) : p.Theta(1, 1);
    const double th_o = p.Theta(0, 1);
    const double rho_d = (asset == 1) ? p.rho1 : p.rho2;
    const double rho_o = (asset == 1) ? p.rho12 : p.rho21;
    const cplx b1 = -2.0 * k * th_d;
    const cplx b0 =
        1.0 + 2.0 * k * th_d - 2.0 * rho_d * y * th_d - 2.0 * rho_o * y * th_o;
    const double scale = std::max({1.0, std::abs(b0), std::abs(b1)});
    if (std::abs(b0) <= 1e-12 * scale) {
      throw DegenerateCoefficientError("constant coefficient vanished");
    }
    cplx I;
    if (std::abs(b1) <= 1e-14 * scale) {
      I = t / b0;
    } else {
      const cplx r = -b0 / b1;
      if (root_on_segment(r, std::min(1.0, q), std::max(1.0, q))) {
        throw BranchError("linear root on the integration segment");
      }
      I = t / b0 - clog1p(b1 * (q - 1.0) / (b0 + b1)) / (2.0 * a * b0);
    }
    log_phi += p.lambda * (I - t);
  }
  return std::exp(log_phi);
}

bool mgf2_in_domain(const OUW2Params& p, const Vec& re_y, double t) {
  if (re_y.size() != 2) throw ShapeError("argument must have length 2");
  if (!p.has_jumps()) return true;
  const CVec yc = re_y.cast<cplx>();

  if (same_a(p)) {
    // Exact determinant positivity over x in [min(1,q), max(1,q)] plus a
    // real-eigenvalue sweep (determinant positivity alone cannot tell two
    // factors below zero from two above).
    const MGFCoefficients c = mgf_coefficients(p, yc);
    const double b0 = c.b0.real(), b1 = c.b1.real(), b2 = c.b2.real();
    const double q = std::exp(2.0 * p.a1 * t);
    const double lo = std::min(1.0, q), hi = std::max(1.0, q);
    auto P = [&](double x) { return (b2 * x + b1) * x + b0; };
    double pmin = std::min(P(lo), P(hi));
    if (b2 != 0.0) {
      const double xv = -b1 / (2.0 * b2);
      if (xv > lo && xv < hi) pmin = std::min(pmin, P(xv));
    }
    if (!(pmin > 0.0)) return false;

    const Mat M = quad_matrix(yc).real();
    const Mat R = rho_adjoint(p, yc).real();
    const SubordinatorSpec sub(Mat::Zero(2, 2),
                               WishartJumpSpec(p.lambda, p.n, p.Theta));
    for (int kk = 0; kk <= 64; ++kk) {
      const double s = t * kk / 64.0;
      const double x = std::exp(2.0 * p.a1 * s);
      const CMat Z = ((x - 1.0) / (4.0 * p.a1) * M + R).cast<cplx>();
      if (!in_moment_domain(sub, Z)) return false;
    }
    return true;
  }
  return mgf_in_domain(to_model_params(p), re_y, t, 128);
}

bool mgf1_in_domain(const OUW2Params& p, int asset, double re_y, double t) {
  if (asset != 1 && asset != 2) throw DomainError("asset must be 1 or 2");
  if (!p.has_jumps()) return true;
  const double a = (asset == 1) ? p.a1 : p.a2;
  const double th_d = (asset == 1) ? p.Theta(0, 0) : p.Theta(1, 1);
  const double th_o = p.Theta(0, 1);
  const double rho_d = (asset == 1) ? p.rho1 : p.rho2;
  const double rho_o = (asset == 1) ? p.rho12 : p.rho21;
  const double k = (re_y * re_y - re_y) / (4.0 * a);
  const double b1 = -2.0 * k * th_d;
  const double b0 =
      1.0 + 2.0 * k * th_d - 2.0 * rho_d * re_y * th_d - 2.0 * rho_o * re_y * th_o;
  // The cumulant argument here has one nonzero eigenvalue, equal to
  // (1 - (b0 + b1 x)) / 2, so positivity of the linear factor is exact.
  const double q = std::exp(2.0 * a * t);
  return b0 + b1 * q > 0.0 && b0 + b1 > 0.0;
}

cplx mgf2(const OUW2Params& p, const CVec& y, double t) {
  if (!mgf2_in_domain(p, y.real(), t)) {
    throw OutOfStripError("Re y outside the joint moment domain");
  }
  if (same_a(p) && (!p.has_jumps() || n_is_two(p))) {
    return mgf2_closed(p, y, t);
  }
  return mgf_unchecked(to_model_params(p), y, t);
}

cplx mgf1(const OUW2Params& p, int asset, cplx y, double t) {
  if (!mgf1_in_domain(p, asset, y.real(), t)) {
    throw OutOfStripError("Re y outside the marginal moment domain");
  }
  if (!p.has_jumps() || n_is_two(p)) return mgf1_closed(p, asset, y, t);
  CVec yv = CVec::Zero(2);
  yv(asset - 1) = y;
  return mgf_unchecked(to_model_params(p), yv, t);
}

double marginal_strip_theta(const OUW2Params& p, int asset, double t) {
  if (asset != 1 && asset != 2) throw DomainError("asset must be 1 or 2");
  if (!p.has_jumps()) return std::numeric_limits<double>::infinity();
  const double eps = 0.5 / spectral_norm(p.Theta);
  const double a = std::abs((asset == 1) ? p.a1 : p.a2);
  const double rho_d = (asset == 1) ? p.rho1 : p.rho2;
  const double rho_o = (asset == 1) ? p.rho12 : p.rho21;
  const double grow = std::exp(2.0 * a * t) + 1.0;
  const double c2 = 0.5 * grow / (2.0 * a);
  const double c1 = std::hypot(rho_d, rho_o) + grow / (2.0 * a) * 0.5;
  return (-c1 + std::sqrt(c1 * c1 + 4.0 * c2 * eps)) / (2.0 * c2);
}

ModelParams to_model_params(const OUW2Params& p) {
  Mat A(2, 2);
  A << p.a1, 0.0, 0.0, p.a2;
  Vec beta_c(2);
  beta_c << -0.5, -0.5;
  LinOpToVec rho = [&] {
    if (p.rho12 == 0.0 && p.rho21 == 0.0) {
      Vec rc(2);
      rc << p.rho1, p.rho2;
      return LinOpToVec::diagonal(rc);
    }
    Mat R1 = Mat::Zero(2, 2), R2 = Mat::Zero(2, 2);
    R1(0, 0) = p.rho1;
    R1(0, 1) = p.rho12;
    R2(1, 0) = p.rho21;
    R2(1, 1) = p.rho2;
    return LinOpToVec::general({R1, R2});
  }();
  Mat gamma = Mat::Zero(2, 2);
  gamma(0, 0) = p.gamma1;
  gamma(1, 1) = p.gamma2;
  std::optional<WishartJumpSpec> jumps;
  if (p.has_jumps()) jumps.emplace(p.lambda, p.n, p.Theta);
  return ModelParams(p.mu, MeanReversion(A), LinOpToVec::diagonal(beta_c),
                     std::move(rho), p.Sigma0, p.Y0,
                     SubordinatorSpec(gamma, std::move(jumps)));
}

}  // namespace msvou
