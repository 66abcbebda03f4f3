#include "msvou/black_scholes.hpp"

#include <algorithm>
#include <cmath>

#include "msvou/errors.hpp"
#include "msvou/special_functions.hpp"

namespace msvou {

namespace {

void check_terms(double S0, double K, double T) {
  if (!(S0 > 0.0)) throw DomainError("spot must be positive");
  if (!(K > 0.0)) throw DomainError("strike must be positive");
  if (!(T > 0.0)) throw DomainError("maturity must be positive");
}

constexpr double kVolLo = 1e-6;
constexpr double kVolHi = 5.0;
constexpr double kVolTol = 1e-10;

}  // namespace

double bs_call(double S0, double K, double T, double r_dom, double r_for,
               double sigma) {
  check_terms(S0, K, T);
  if (!(sigma >= 0.0)) throw DomainError("volatility must be non-negative");
  const double F = S0 * std::exp((r_dom - r_for) * T);
  const double df = std::exp(-r_dom * T);
  if (sigma == 0.0) return df * std::max(F - K, 0.0);
  const double sd = sigma * std::sqrt(T);
  const double d1 = std::log(F / K) / sd + 0.5 * sd;
  const double d2 = d1 - sd;
  return df * (F * norm_cdf(d1) - K * norm_cdf(d2));
}

double bs_vega(double S0, double K, double T, double r_dom, double r_for,
               double sigma) {
  check_terms(S0, K, T);
  if (!(sigma > 0.0)) throw DomainError("volatility must be positive");
  const double F = S0 * std::exp((r_dom - r_for) * T);
  const double sd = sigma * std::sqrt(T);
  const double d1 = std::log(F / K) / sd + 0.5 * sd;
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  return std::exp(-r_dom * T) * F * inv_sqrt_2pi * std::exp(-0.5 * d1 * d1) *
         std::sqrt(T);
}

double implied_vol(double price, double S0, double K, double T, double r_dom,
                   double r_for) {
  check_terms(S0, K, T);
  const double lo_price = bs_call(S0, K, T, r_dom, r_for, kVolLo);
  const double hi_price = bs_call(S0, K, T, r_dom, r_for, kVolHi);
  if (!(price > 0.0) || price <= lo_price || price >= hi_price) {
    throw ArbitrageError("price outside the attainable volatility band");
  }

  double lo = kVolLo, hi = kVolHi;
  double sigma = std::clamp(std::sqrt(2.0 * std::abs(std::log(
                                S0 * std::exp((r_dom - r_for) * T) / K)) /
                                T) +
                                0.2,
                            lo, hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double f = bs_call(S0, K, T, r_dom, r_for, sigma) - price;
    if (f > 0.0) {
      hi = sigma;
    } else {
      lo = sigma;
    }
    double step;
    const double vega = bs_vega(S0, K, T, r_dom, r_for, sigma);
    if (vega > 1e-14) {
      step = -f / vega;
    } else {
      step = 0.5 * (lo + hi) - sigma;
    }
    double next = sigma + step;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);  // safeguard
    if (std::abs(next - sigma) < kVolTol) return next;
    sigma = next;
  }
  throw NumericError("implied volatility iteration failed to converge");
}

}  // namespace msvou
