#include "msvou/benchmarks.hpp"

#include <cmath>
#include <vector>

#include "msvou/errors.hpp"
#include "msvou/special_functions.hpp"

namespace msvou {

namespace {

// log of the unit-time VG factor (1 - theta nu y - sigma^2 nu y^2 / 2)^{-1/nu}.
cplx vg_log_factor(double theta, double sigma, double nu, cplx y) {
  const cplx arg = 1.0 - theta * nu * y - 0.5 * sigma * sigma * nu * y * y;
  if (arg.real() <= 0.0 && std::abs(arg.imag()) <= 1e-14 * std::abs(arg)) {
    throw DomainError("VG argument on the principal-log cut");
  }
  return -std::log(arg) / nu;
}

void validate_vg(double sigma, double nu) {
  if (!(sigma >= 0.0)) throw DomainError("sigma must be non-negative");
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
}

}  // namespace

cplx vg_common_mgf(const VGCommonParams& p, cplx y1, cplx y2, double t) {
  validate_vg(p.sigma1, p.nu);
  validate_vg(p.sigma2, p.nu);
  if (!(t >= 0.0)) throw DomainError("t must be non-negative");
  auto w = [&](double theta, double sigma) {
    const double arg = 1.0 - theta * p.nu - 0.5 * sigma * sigma * p.nu;
    if (!(arg > 0.0)) throw DomainError("martingale correction undefined");
    return std::log(arg) / p.nu;
  };
  const double w1 = w(p.theta1, p.sigma1);
  const double w2 = w(p.theta2, p.sigma2);
  const cplx drift = y1 * (p.r_dom - p.r_for1 + w1) + y2 * (p.r_dom - p.r_for2 + w2);
  const cplx arg = 1.0 - p.nu * (p.theta1 * y1 + 0.5 * p.sigma1 * p.sigma1 * y1 * y1 +
                                 p.theta2 * y2 + 0.5 * p.sigma2 * p.sigma2 * y2 * y2);
  if (arg.real() <= 0.0 && std::abs(arg.imag()) <= 1e-14 * std::abs(arg)) {
    throw DomainError("VG argument on the principal-log cut");
  }
  return std::exp(drift * t - (t / p.nu) * std::log(arg));
}

std::pair<double, double> vg_common_sample(const VGCommonParams& p, double t,
                                           std::mt19937_64& rng) {
  validate_vg(p.sigma1, p.nu);
  validate_vg(p.sigma2, p.nu);
  if (!(t > 0.0)) throw DomainError("t must be positive");
  const double w1 =
      std::log(1.0 - p.theta1 * p.nu - 0.5 * p.sigma1 * p.sigma1 * p.nu) / p.nu;
  const double w2 =
      std::log(1.0 - p.theta2 * p.nu - 0.5 * p.sigma2 * p.sigma2 * p.nu) / p.nu;
  std::gamma_distribution<double> gamma(t / p.nu, p.nu);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double G = gamma(rng);
  const double sg = std::sqrt(G);
  const double y1 =
      (p.r_dom - p.r_for1 + w1) * t + p.theta1 * G + p.sigma1 * sg * gauss(rng);
  const double y2 =
      (p.r_dom - p.r_for2 + w2) * t + p.theta2 * G + p.sigma2 * sg * gauss(rng);
  return {y1, y2};
}

cplx vggou_clock_mgf(const VGGOUParams& p, cplx y, double t) {
  if (!(p.alpha < 0.0)) throw DomainError("alpha must be negative");
  if (!(p.vartheta > 0.0) || !(p.xi > 0.0)) {
    throw DomainError("clock jump parameters must be positive");
  }
  if (!(t >= 0.0)) throw DomainError("t must be non-negative");
  const double a2 = 2.0 * p.alpha;
  const double eps_t = std::expm1(a2 * t) / a2;
  const cplx pole = y + a2 * p.xi;
  if (std::abs(pole) <= 1e-12 * std::max(1.0, std::abs(y))) {
    throw DomainError("clock MGF evaluated at its removable pole");
  }
  const cplx arg = -y * eps_t / p.xi;
  if ((1.0 + arg).real() <= 0.0 && std::abs(arg.imag()) <= 1e-14) {
    throw DomainError("clock MGF argument on the principal-log cut");
  }
  return std::exp(y * eps_t +
                  (a2 * p.vartheta / pole) * (t * y + p.xi * clog1p(arg)));
}

cplx vggou_mgf(const VGGOUParams& p, cplx y1, cplx y2, double t) {
  validate_vg(p.sigma1, p.nu1);
  validate_vg(p.sigma2, p.nu2);
  const cplx l1 = vg_log_factor(p.theta1, p.sigma1, p.nu1, y1);
  const cplx l2 = vg_log_factor(p.theta2, p.sigma2, p.nu2, y2);
  const cplx raw = vggou_clock_mgf(p, l1 + l2, t);
  const double n1 =
      std::log(vggou_clock_mgf(p, vg_log_factor(p.theta1, p.sigma1, p.nu1, 1.0), t)
                   .real());
  const double n2 =
      std::log(vggou_clock_mgf(p, vg_log_factor(p.theta2, p.sigma2, p.nu2, 1.0), t)
                   .real());
  const cplx drift = y1 * ((p.r_dom - p.r_for1) * t - n1) +
                     y2 * ((p.r_dom - p.r_for2) * t - n2);
  return std::exp(drift) * raw;
}

std::pair<double, double> vggou_sample(const VGGOUParams& p, double t,
                                       std::mt19937_64& rng) {
  validate_vg(p.sigma1, p.nu1);
  validate_vg(p.sigma2, p.nu2);
  if (!(p.alpha < 0.0)) throw DomainError("alpha must be negative");
  if (!(t > 0.0)) throw DomainError("t must be positive");
  const double a2 = 2.0 * p.alpha;
  auto eps = [&](double s) { return std::expm1(a2 * s) / a2; };

  // Integrated clock: deterministic head plus Exp(xi) jumps arriving
  // uniformly on [0, t] at rate -2 alpha vartheta.
  std::poisson_distribution<int> pois(-a2 * p.vartheta * t);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(p.xi);
  double Z = eps(t);
  const int nj = pois(rng);
  for (int k = 0; k < nj; ++k) {
    const double s = t * unif(rng);
    Z += eps(t - s) * expo(rng);
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  auto leg = [&](double theta, double sigma, double nu, double r_for,
                 double norm_log) {
    std::gamma_distribution<double> gamma(Z / nu, nu);
    const double G = gamma(rng);
    return theta * G + sigma * std::sqrt(G) * gauss(rng) +
           (p.r_dom - r_for) * t - norm_log;
  };
  const double n1 =
      std::log(vggou_clock_mgf(p, vg_log_factor(p.theta1, p.sigma1, p.nu1, 1.0), t)
                   .real());
  const double n2 =
      std::log(vggou_clock_mgf(p, vg_log_factor(p.theta2, p.sigma2, p.nu2, 1.0), t)
                   .real());
  return {leg(p.theta1, p.sigma1, p.nu1, p.r_for1, n1),
          leg(p.theta2, p.sigma2, p.nu2, p.r_for2, n2)};
}

}  // namespace msvou
