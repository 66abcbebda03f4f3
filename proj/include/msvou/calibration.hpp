#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "msvou/fourier_pricing.hpp"

namespace msvou {

struct OptionQuote {
  std::string pair;
  double maturity_years = 0.0;
  double strike = 0.0;
  std::string type = "call";
  double bid = 0.0, ask = 0.0;
  double spot = 0.0;
  double r_dom = 0.0, r_for = 0.0;
  double mid() const { return 0.5 * (bid + ask); }
};

// Which market pair maps to which model leg. The cross pair is priced as a
// zero-strike spread between the two dollar legs and re-denominated.
struct MarketRouting {
  std::string asset1_pair = "EURUSD";
  std::string asset2_pair = "GBPUSD";
  std::string cross_pair = "EURGBP";
  double spot1 = 0.0;  // dollar spot of leg 1
  double spot2 = 0.0;  // dollar spot of leg 2
};

// Transform sources for a fixed parameter point, reused across quotes.
class QuotePricer {
 public:
  QuotePricer(OUW2Params params, MarketRouting routing,
              double price_tol = 1e-9);
  const OUW2Params& params() const { return params_; }

  // Price in the quote currency (domestic leg of the pair).
  double price(const OptionQuote& q) const;
  // Implied volatility of that price under the quote's own terms.
  double implied_vol(const OptionQuote& q) const;

 private:
  OUW2Params params_;
  MarketRouting routing_;
  Ouw2MarginalSource m1_, m2_;
  Ouw2MgfSource joint_;
  PriceOptions opts_;
};

enum class CalibVariant { A, B, C, D };

// Free coordinates per variant (before `fixed` pinning):
//   A: lambda, a, rho1, rho2, gamma1, gamma2, theta11, theta12, theta22,
//      sigma0_11, sigma0_12, sigma0_22             (a1 == a2, no cross rho)
//   B: A plus rho12, rho21
//   C: A with a replaced by a1, a2
//   D: C plus rho12, rho21
// Theta and Sigma0 move through Cholesky factors, so PSD holds by
// construction (Sigma0 keeps a 1e-8 diagonal floor).
struct CalibConfig {
  CalibVariant variant = CalibVariant::A;
  std::map<std::string, double> init;   // every free name must be present
  std::map<std::string, double> lb, ub; // optional natural-space box
  std::map<std::string, double> fixed;  // pins a name to a value
  long max_evals = 5000;
  double tol_obj = 1e-10;
  std::uint64_t seed = 1;
  int restarts = 2;
  double price_tol = 1e-7;
  bool vega_weighted = false;  // weight squared IV errors by market vega
};

struct QuoteReportRow {
  std::string pair;
  double T, K, market_iv, model_iv, abs_err;
};

struct CalibResult {
  OUW2Params params;
  double rmse = 0.0;
  std::map<std::string, double> rmse_by_pair;
  long evals = 0;
  int dropped = 0;  // market quotes screened out before the fit
  std::vector<QuoteReportRow> report;
};

// Implied-vol RMSE of the model against quote mids. Any quote that cannot
// be priced or inverted makes the objective +inf; *infeasible reports how
// many did. With `vega_weighted` the squared errors are weighted by the
// Black-Scholes vega at the market vol (normalized to sum to one).
double quote_rmse(const QuotePricer& pricer,
                  const std::vector<OptionQuote>& quotes,
                  int* infeasible = nullptr, bool vega_weighted = false);

// Nelder-Mead fit (deterministic for fixed seed) with box projection and
// seeded restarts. `base` supplies everything the variant does not move
// (rates, n, Y0). Throws CalibrationFailure when no feasible point is found.
CalibResult calibrate(const std::vector<OptionQuote>& quotes,
                      const MarketRouting& routing, const CalibConfig& config,
                      const OUW2Params& base);

// Synthetic smile grid from known parameters: for each pair and maturity,
// strikes F exp(z sigma_atm sqrt(T)) over an equispaced z in [-1.5, 1.5].
// Bid and ask straddle the model price by half `spread` (relative).
std::vector<OptionQuote> synthesize_quotes(const OUW2Params& params,
                                           const MarketRouting& routing,
                                           const std::vector<double>& maturities,
                                           int strikes_per_smile,
                                           double spread = 0.0);

}  // namespace msvou
