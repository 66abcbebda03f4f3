#include "msvou/fourier_pricing.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>

#include "msvou/quadrature.hpp"
#include "msvou/special_functions.hpp"

namespace msvou {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kMargin = 1e-3;  // strictness margin for damping regions

cplx kpow(double K, const cplx& w) { return std::exp(w * std::log(K)); }

}  // namespace

ModelMgfSource::ModelMgfSource(ModelParams params) : params_(std::move(params)) {}
int ModelMgfSource::dim() const { return params_.dim(); }
cplx ModelMgfSource::mgf(const CVec& y, double T) const {
  return mgf_unchecked(params_, y, T);
}
bool ModelMgfSource::in_domain(const Vec& re_y, double T) const {
  return mgf_in_domain(params_, re_y, T, 128);
}
Mat ModelMgfSource::decay_matrix(double T) const {
  return msvou::decay_matrix(params_, T);
}
double ModelMgfSource::strip_theta(double T) const {
  return strip_radius(params_, T).theta;
}

Ouw2MgfSource::Ouw2MgfSource(OUW2Params params)
    : params_(std::move(params)),
      embedded_(to_model_params(params_)),
      closed_form_(std::abs(params_.a1 - params_.a2) <=
                       1e-13 * std::max(std::abs(params_.a1),
                                        std::abs(params_.a2)) &&
                   (!params_.has_jumps() || std::abs(params_.n - 2.0) <= 1e-12)) {}
cplx Ouw2MgfSource::mgf(const CVec& y, double T) const {
  if (closed_form_) return mgf2_closed(params_, y, T);
  return mgf_unchecked(embedded_, y, T);
}
bool Ouw2MgfSource::in_domain(const Vec& re_y, double T) const {
  return mgf2_in_domain(params_, re_y, T);
}
Mat Ouw2MgfSource::decay_matrix(double T) const {
  return msvou::decay_matrix(embedded_, T);
}
double Ouw2MgfSource::strip_theta(double T) const {
  return strip_radius(embedded_, T).theta;
}

Ouw2MarginalSource::Ouw2MarginalSource(OUW2Params params, int asset)
    : params_(std::move(params)),
      embedded_(to_model_params(params_)),
      asset_(asset) {
  if (asset != 1 && asset != 2) throw DomainError("asset must be 1 or 2");
}
cplx Ouw2MarginalSource::mgf(const CVec& y, double T) const {
  if (y.size() != 1) throw ShapeError("marginal argument must be scalar");
  if (!params_.has_jumps() || std::abs(params_.n - 2.0) <= 1e-12) {
    return mgf1_closed(params_, asset_, y(0), T);
  }
  CVec full = CVec::Zero(2);
  full(asset_ - 1) = y(0);
  return mgf_unchecked(embedded_, full, T);
}
bool Ouw2MarginalSource::in_domain(const Vec& re_y, double T) const {
  return mgf1_in_domain(params_, asset_, re_y(0), T);
}
Mat Ouw2MarginalSource::decay_matrix(double T) const {
  const Mat M2 = msvou::decay_matrix(embedded_, T);
  Mat M(1, 1);
  M(0, 0) = M2(asset_ - 1, asset_ - 1);
  return M;
}
double Ouw2MarginalSource::strip_theta(double T) const {
  return marginal_strip_theta(params_, asset_, T);
}

PayoffTransform transform_call(double K) {
  if (!(K > 0.0)) throw DomainError("strike must be positive");
  PayoffTransform p;
  p.dim = 1;
  p.name = "call";
  p.fhat = [K](const CVec& z) -> cplx {
    const cplx iz = cplx(0.0, 1.0) * z(0);
    return kpow(K, 1.0 + iz) / (iz * (1.0 + iz));
  };
  p.damping_ok = [](const Vec& R) { return R(0) >= 1.0 + kMargin; };
  return p;
}

PayoffTransform transform_basket_put(double K, int d) {
  if (!(K > 0.0)) throw DomainError("strike must be positive");
  if (d < 1) throw ShapeError("basket dimension must be positive");
  PayoffTransform p;
  p.dim = d;
  p.name = "basket_put";
  p.fhat = [K, d](const CVec& z) -> cplx {
    const cplx izsum = cplx(0.0, 1.0) * z.sum();
    cplx num = kpow(K, 1.0 + izsum);
    for (int j = 0; j < d; ++j) num *= cgamma(cplx(0.0, 1.0) * z(j));
    return num / cgamma(2.0 + izsum);
  };
  p.damping_ok = [d](const Vec& R) {
    for (int j = 0; j < d; ++j) {
      if (!(R(j) <= -kMargin)) return false;
    }
    return true;
  };
  return p;
}

PayoffTransform transform_spread_call(double K) {
  if (!(K > 0.0)) throw DomainError("strike must be positive");
  PayoffTransform p;
  p.dim = 2;
  p.name = "spread_call";
  p.fhat = [K](const CVec& z) -> cplx {
    const cplx I(0.0, 1.0);
    const cplx iz1 = I * z(0);
    const cplx iz2 = I * z(1);
    return kpow(K, 1.0 + iz1 + iz2) / (iz1 * (1.0 + iz1)) * cgamma(iz2) *
           cgamma(-iz1 - iz2 - 1.0) / cgamma(-iz1 - 1.0);
  };
  p.damping_ok = [](const Vec& R) {
    return R(0) >= 1.0 + kMargin && R(1) <= -kMargin &&
           R(0) + R(1) >= 1.0 + kMargin;
  };
  return p;
}

namespace {

// Truncation radius from the Gaussian envelope; amp bounds the integrand
// modulus at u = 0, lam the quadratic decay rate.
double initial_cutoff(double amp, double lam, double tol) {
  if (!(lam > 1e-14) || !(amp > 0.0)) return 100.0;
  const double ratio = std::max(amp / (0.01 * tol), 1.0);
  const double U = std::sqrt(2.0 * std::log(ratio) / lam);
  return std::clamp(U, 20.0, 2000.0);
}

struct TailAccumulator {
  cplx total{0.0, 0.0};
  double rule_err = 0.0;
  long evals = 0;
  double tail = 0.0;  // magnitude of the last extension
};

}  // namespace

PriceResult price(const MgfSource& source, const PayoffTransform& payoff,
                  const Vec& R, const Vec& S0, double T, double r_dom,
                  const PriceOptions& opts) {
  const int d = source.dim();
  if (payoff.dim != d || R.size() != d || S0.size() != d) {
    throw ShapeError("pricing dimensions disagree");
  }
  if (d < 1 || d > 2) throw ShapeError("only one or two assets supported");
  if (!(T > 0.0)) throw DomainError("maturity must be positive");
  for (int j = 0; j < d; ++j) {
    if (!(S0(j) > 0.0)) throw DomainError("spots must be positive");
  }
  if (!payoff.damping_ok(R)) {
    throw DampingError("damping outside the payoff feasibility region");
  }
  if (!source.in_domain(R, T)) {
    throw DampingError("transform undefined at the requested damping");
  }

  const Vec s = -S0.array().log();
  const double pref =
      std::exp(-R.dot(s) - r_dom * T) / std::pow(kTwoPi, d);
  const double qtol = opts.tol / std::max(pref, 1e-30);

  long evals = 0;
  auto phi = [&](const CVec& y) -> cplx {
    ++evals;
    return source.mgf(y, T);
  };

  const Mat M = source.decay_matrix(T);
  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  const double lam = std::max(es.eigenvalues().minCoeff(), 0.0);
  const double phiR = std::abs(phi(R.cast<cplx>()));
  const cplx I(0.0, 1.0);
  CVec z0 = I * R.cast<cplx>();
  const double F0 = std::abs(payoff.fhat(z0));
  double U = initial_cutoff(phiR * std::max(F0, 1e-12), lam, qtol);

  TailAccumulator acc;
  if (d == 1) {
    auto g = [&](double u) -> cplx {
      const CVec y = (CVec(1) << cplx(R(0), u)).finished();
      const CVec z = (CVec(1) << cplx(-u, R(0))).finished();  // iR - u
      return std::exp(-I * u * s(0)) * phi(y) * payoff.fhat(z);
    };
    QuadResult part =
        integrate_gk(g, 0.0, U, 0.25 * qtol, opts.max_evals - evals);
    acc.total = part.value;
    acc.rule_err = part.error;
    bool converged = false;
    for (int k = 0; k < opts.max_doublings; ++k) {
      QuadResult ext =
          integrate_gk(g, U, 2.0 * U, 0.25 * qtol, opts.max_evals - evals);
      U *= 2.0;
      acc.total += ext.value;
      acc.rule_err += ext.error;
      acc.tail = std::abs(ext.value);
      if (acc.tail <= 0.25 * qtol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw QuadratureError("transform tail did not decay within cutoff");
    }
  } else {
    const double inner_tol_scale = 0.125;
    auto rect = [&](double u1a, double u1b, double u2a, double u2b) {
      const double inner_tol =
          std::max(inner_tol_scale * qtol / std::max(u1b, 1.0), 1e-14);
      auto outer = [&](double u1) -> cplx {
        auto inner = [&](double u2) -> cplx {
          const CVec y =
              (CVec(2) << cplx(R(0), u1), cplx(R(1), u2)).finished();
          const CVec z =
              (CVec(2) << cplx(-u1, R(0)), cplx(-u2, R(1))).finished();
          return std::exp(-I * (u1 * s(0) + u2 * s(1))) * phi(y) *
                 payoff.fhat(z);
        };
        return integrate_gk(inner, u2a, u2b, inner_tol,
                            opts.max_evals - evals)
            .value;
      };
      return integrate_gk(outer, u1a, u1b, 0.125 * qtol,
                          opts.max_evals - evals);
    };
    QuadResult part = rect(0.0, U, -U, U);
    acc.total = part.value;
    acc.rule_err = part.error;
    bool converged = false;
    for (int k = 0; k < opts.max_doublings; ++k) {
      const QuadResult e1 = rect(U, 2.0 * U, -2.0 * U, 2.0 * U);
      const QuadResult e2 = rect(0.0, U, U, 2.0 * U);
      const QuadResult e3 = rect(0.0, U, -2.0 * U, -U);
      U *= 2.0;
      const cplx inc = e1.value + e2.value + e3.value;
      acc.total += inc;
      acc.rule_err += e1.error + e2.error + e3.error;
      acc.tail = std::abs(inc);
      if (acc.tail <= 0.25 * qtol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw QuadratureError("transform tail did not decay within cutoff");
    }
  }

  PriceResult out;
  out.price = pref * 2.0 * acc.total.real();
  out.quad_error = pref * 2.0 * (acc.rule_err + acc.tail);
  out.evals = evals;
  out.truncation = U;
  return out;
}

PriceResult price_zero_strike_spread(const MgfSource& source, double R,
                                     double S01, double S02, double T,
                                     double r_dom, const PriceOptions& opts) {
  if (source.dim() != 2) throw ShapeError("zero-strike spread needs 2 assets");
  if (!(T > 0.0)) throw DomainError("maturity must be positive");
  if (!(S01 > 0.0) || !(S02 > 0.0)) throw DomainError("spots must be positive");
  if (!(R >= 1.0 + kMargin)) {
    throw DampingError("zero-strike spread requires damping above 1");
  }
  Vec reY(2);
  reY << R, 1.0 - R;
  if (!source.in_domain(reY, T)) {
    throw DampingError("transform undefined at the requested damping");
  }

  const double s1 = -std::log(S01);
  const double s2 = -std::log(S02);
  const double pref = std::exp(R * (s2 - s1) - s2 - r_dom * T) / kTwoPi;
  const double qtol = opts.tol / std::max(pref, 1e-30);

  long evals = 0;
  auto phi = [&](const CVec& y) -> cplx {
    ++evals;
    return source.mgf(y, T);
  };

  const Mat M = source.decay_matrix(T);
  Vec v(2);
  v << 1.0, -1.0;
  const double lam = std::max(v.dot(M * v), 0.0);
  const double phiR = std::abs(phi(reY.cast<cplx>()));
  const double F0 = 1.0 / std::abs(R * (R - 1.0));
  double U = initial_cutoff(phiR * F0, lam, qtol);

  const cplx I(0.0, 1.0);
  auto g = [&](double u) -> cplx {
    const cplx w(R, u);
    const CVec y = (CVec(2) << w, 1.0 - w).finished();
    return std::exp(I * u * (s2 - s1)) * phi(y) / (w * (w - 1.0));
  };

  TailAccumulator acc;
  QuadResult part = integrate_gk(g, 0.0, U, 0.25 * qtol, opts.max_evals - evals);
  acc.total = part.value;
  acc.rule_err = part.error;
  bool converged = false;
  for (int k = 0; k < opts.max_doublings; ++k) {
    QuadResult ext =
        integrate_gk(g, U, 2.0 * U, 0.25 * qtol, opts.max_evals - evals);
    U *= 2.0;
    acc.total += ext.value;
    acc.rule_err += ext.error;
    acc.tail = std::abs(ext.value);
    if (acc.tail <= 0.25 * qtol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw QuadratureError("transform tail did not decay within cutoff");
  }

  PriceResult out;
  out.price = pref * 2.0 * acc.total.real();
  out.quad_error = pref * 2.0 * (acc.rule_err + acc.tail);
  out.evals = evals;
  out.truncation = U;
  return out;
}

double default_damping_call(const MgfSource& marginal, double T) {
  const double theta = marginal.strip_theta(T);
  const double cand = std::isinf(theta) ? 1.75 : std::min(1.75, 0.5 * (1.0 + theta));
  return std::max(cand, 1.0 + kMargin);
}

Vec default_damping_basket(const MgfSource& joint, double T) {
  const double theta = joint.strip_theta(T);
  const double mag =
      std::isinf(theta) ? 2.0 : std::clamp(0.5 * theta, 0.75, 2.0);
  return Vec::Constant(joint.dim(), -mag);
}

Vec default_damping_spread() {
  Vec R(2);
  R << 2.0, -0.5;
  return R;
}

double default_damping_zero_strike() { return 2.0; }

}  // namespace msvou
