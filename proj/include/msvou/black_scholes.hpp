#pragma once

namespace msvou {

// Garman-Kohlhagen call price (domestic/foreign carry).
double bs_call(double S0, double K, double T, double r_dom, double r_for,
               double sigma);

double bs_vega(double S0, double K, double T, double r_dom, double r_for,
               double sigma);

// Implied volatility of a call via safeguarded Newton / bisection on
// [1e-6, 5], tolerance 1e-10. Prices outside the static no-arbitrage band
// (or unreachable inside the bracket) raise ArbitrageError.
double implied_vol(double price, double S0, double K, double T, double r_dom,
                   double r_for);

}  // namespace msvou
