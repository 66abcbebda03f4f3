// Command-line front end: pricing, calibration, simulation, swap curves,
// smile dumps, and a closed-form vs quadrature MGF self-check.

#include <cmath>
#include <complex>
#include <iomanip>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msvou/black_scholes.hpp"
#include "msvou/calibration.hpp"
#include "msvou/covswap.hpp"
#include "msvou/fourier_pricing.hpp"
#include "msvou/io.hpp"
#include "msvou/mc_engine.hpp"
#include "msvou/ou_wishart.hpp"
#include "msvou/rng.hpp"

namespace {

struct PairTerms {
  double spot, r_dom, r_for;
};

PairTerms pair_terms(const msvou::MarketSetup& setup, const std::string& pair) {
  const msvou::OUW2Params& p = setup.params;
  const msvou::MarketRouting& r = setup.routing;
  if (pair == r.asset1_pair) return {r.spot1, p.r_dom, p.r_for1};
  if (pair == r.asset2_pair) return {r.spot2, p.r_dom, p.r_for2};
  if (pair == r.cross_pair) return {r.spot1 / r.spot2, p.r_for2, p.r_for1};
  throw msvou::ConfigError("pair " + pair + " not in the market routing");
}

std::vector<double> parse_list(const std::string& text,
                               const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(msvou::parse_double(text.substr(pos, comma - pos), what));
    pos = comma + 1;
  }
  if (out.empty()) throw msvou::ConfigError(what + " list is empty");
  return out;
}

msvou::OptionQuote make_quote(const msvou::MarketSetup& setup,
                              const std::string& pair, double strike,
                              double maturity) {
  const PairTerms terms = pair_terms(setup, pair);
  msvou::OptionQuote q;
  q.pair = pair;
  q.maturity_years = maturity;
  q.strike = strike;
  q.spot = terms.spot;
  q.r_dom = terms.r_dom;
  q.r_for = terms.r_for;
  return q;
}

int run_price(const std::string& model_file, const std::string& pair,
              double strike, double maturity, double tol) {
  const msvou::MarketSetup setup = msvou::load_market(model_file);
  const msvou::OptionQuote q = make_quote(setup, pair, strike, maturity);
  msvou::PriceOptions opts;
  opts.tol = tol;

  msvou::PriceResult res;
  if (pair == setup.routing.cross_pair) {
    res = msvou::price_zero_strike_spread(
        msvou::Ouw2MgfSource(setup.params),
        msvou::default_damping_zero_strike(), setup.routing.spot1,
        strike * setup.routing.spot2, maturity, setup.params.r_dom, opts);
    res.price /= setup.routing.spot2;
    res.quad_error /= setup.routing.spot2;
  } else {
    const int asset = (pair == setup.routing.asset1_pair) ? 1 : 2;
    const msvou::Ouw2MarginalSource src(setup.params, asset);
    msvou::Vec R(1), S0(1);
    R << msvou::default_damping_call(src, maturity);
    S0 << q.spot;
    res = msvou::price(src, msvou::transform_call(strike), R, S0, maturity,
                       setup.params.r_dom, opts);
  }
  const double iv = msvou::implied_vol(res.price, q.spot, q.strike,
                                       q.maturity_years, q.r_dom, q.r_for);
  std::cout << "price = " << res.price << "\n";
  std::cout << "quad_error = " << res.quad_error << "\n";
  std::cout << "implied_vol = " << iv << "\n";
  return 0;
}

int run_smile(const std::string& model_file, const std::string& pair,
              const std::string& maturity_list, int n_strikes, double width,
              const std::string& out_file) {
  const msvou::MarketSetup setup = msvou::load_market(model_file);
  const msvou::QuotePricer pricer(setup.params, setup.routing);
  const PairTerms terms = pair_terms(setup, pair);
  std::vector<msvou::SmileRow> rows;
  for (double T : parse_list(maturity_list, "maturities")) {
    const double F = terms.spot * std::exp((terms.r_dom - terms.r_for) * T);
    const double atm = pricer.implied_vol(make_quote(setup, pair, F, T));
    for (int k = 0; k < n_strikes; ++k) {
      const double z = (n_strikes == 1)
                           ? 0.0
                           : -width + 2.0 * width * k / (n_strikes - 1);
      const double K = F * std::exp(z * atm * std::sqrt(T));
      rows.push_back({K, T, pricer.implied_vol(make_quote(setup, pair, K, T))});
    }
  }
  msvou::save_smile(out_file, rows);
  std::cout << "wrote " << rows.size() << " rows to " << out_file << "\n";
  return 0;
}

int run_calibrate(const std::string& quotes_file, const std::string& cfg_file,
                  const std::string& model_file, const std::string& out_file,
                  const std::string& report_file, bool vega_weighted) {
  const msvou::MarketSetup base = msvou::load_market(model_file);
  const std::vector<msvou::OptionQuote> quotes =
      msvou::load_quotes(quotes_file);
  msvou::CalibConfig cfg = msvou::load_calib_config(cfg_file);
  if (vega_weighted) cfg.vega_weighted = true;

  // Any starting value the config leaves out comes from the base market.
  const msvou::OUW2Params& p = base.params;
  auto dflt = [&cfg](const std::string& name, double value) {
    if (!cfg.init.count(name)) cfg.init[name] = value;
  };
  dflt("lambda", p.lambda);
  dflt("a", p.a1);
  dflt("a1", p.a1);
  dflt("a2", p.a2);
  dflt("rho1", p.rho1);
  dflt("rho2", p.rho2);
  dflt("rho12", p.rho12);
  dflt("rho21", p.rho21);
  dflt("gamma1", p.gamma1);
  dflt("gamma2", p.gamma2);
  dflt("theta11", p.Theta(0, 0));
  dflt("theta12", p.Theta(0, 1));
  dflt("theta22", p.Theta(1, 1));
  dflt("sigma0_11", p.Sigma0(0, 0));
  dflt("sigma0_12", p.Sigma0(0, 1));
  dflt("sigma0_22", p.Sigma0(1, 1));

  const msvou::CalibResult res =
      msvou::calibrate(quotes, base.routing, cfg, base.params);
  std::cout << "rmse = " << res.rmse << "\n";
  std::cout << "evals = " << res.evals << "\n";
  if (res.dropped > 0) {
    std::cerr << "warning: dropped " << res.dropped
              << " quote(s) outside the no-arbitrage band\n";
  }
  for (const auto& [name, rmse] : res.rmse_by_pair) {
    std::cout << "rmse[" << name << "] = " << rmse << "\n";
  }
  if (!out_file.empty()) {
    msvou::save_market(out_file, {res.params, base.routing});
    std::cout << "fitted market written to " << out_file << "\n";
  }
  if (!report_file.empty()) {
    msvou::save_report(report_file, res.report);
    std::cout << "report written to " << report_file << "\n";
  }
  return 0;
}

int run_simulate(const std::string& model_file, double maturity,
                 std::size_t n_paths, std::uint64_t seed, int steps,
                 bool antithetic, const std::string& out_file) {
  const msvou::MarketSetup setup = msvou::load_market(model_file);
  msvou::MCConfig cfg;
  cfg.n_paths = n_paths;
  cfg.seed = seed;
  cfg.antithetic = antithetic;
  for (int k = 0; k <= steps; ++k) {
    cfg.t_grid.push_back(maturity * k / steps);
  }
  const auto paths =
      msvou::simulate_grid(msvou::to_model_params(setup.params), maturity, cfg);
  msvou::save_paths(out_file, paths);
  std::cout << "wrote " << paths.size() << " paths (" << (steps + 1)
            << " points each) to " << out_file << "\n";
  return 0;
}

int run_covswap(const std::string& model_file, int i, int j,
                const std::string& maturity_list, const std::string& out_file) {
  const msvou::MarketSetup setup = msvou::load_market(model_file);
  const msvou::ModelParams p = msvou::to_model_params(setup.params);
  const auto curve =
      msvou::normalized_rate_curve(p, i, j, parse_list(maturity_list, "T"));
  for (const auto& [T, rate] : curve) {
    std::cout << "T = " << T << "  swap_rate = "
              << msvou::swap_rate(p, i, j, T) << "  normalized = " << rate
              << "\n";
  }
  if (!out_file.empty()) {
    msvou::save_curve(out_file, curve);
    std::cout << "curve written to " << out_file << "\n";
  }
  return 0;
}

int run_mgfcheck(const std::string& model_file, double maturity, int n_points,
                 std::uint64_t seed) {
  const msvou::MarketSetup setup = msvou::load_market(model_file);
  const msvou::OUW2Params& p = setup.params;
  const msvou::ModelParams embedded = msvou::to_model_params(p);
  const msvou::StripInfo strip = msvou::strip_radius(embedded, maturity);
  const double radius =
      std::isfinite(strip.theta) ? 0.9 * strip.theta : 2.0;

  std::mt19937_64 rng = msvou::make_stream(seed, 0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double max_rel = 0.0;
  int checked = 0;
  while (checked < n_points) {
    msvou::Vec re(2);
    re << radius * unif(rng), radius * unif(rng);
    if (re.norm() >= radius) continue;
    msvou::CVec y(2);
    y << msvou::cplx(re(0), 10.0 * unif(rng)),
        msvou::cplx(re(1), 10.0 * unif(rng));
    const msvou::cplx closed = msvou::mgf2_closed(p, y, maturity);
    const msvou::cplx quad = msvou::mgf_unchecked(embedded, y, maturity);
    max_rel = std::max(max_rel, std::abs(closed - quad) / std::abs(quad));
    ++checked;
  }
  std::cout << "strip_theta = " << strip.theta << "\n";
  std::cout << "points = " << checked << "\n";
  std::cout << "max_rel_err = " << max_rel << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::cout << std::setprecision(17);
  CLI::App app{"Two-asset OU-Wishart stochastic volatility toolkit"};
  app.require_subcommand(1);

  std::string model_file, pair, quotes_file, cfg_file, out_file, report_file;
  std::string maturity_list;
  double strike = 0.0, maturity = 1.0, tol = 1e-9, width = 1.5;
  int n_strikes = 11, steps = 16, leg_i = 1, leg_j = 2, n_points = 100;
  std::size_t n_paths = 100;
  std::uint64_t seed = 1;
  bool antithetic = false;

  CLI::App* price = app.add_subcommand("price", "Price a European FX call");
  price->add_option("--model", model_file, "market parameter file")
      ->required();
  price->add_option("--pair", pair, "quote pair name")->required();
  price->add_option("--strike", strike)->required()->check(CLI::PositiveNumber);
  price->add_option("--maturity", maturity)
      ->required()
      ->check(CLI::PositiveNumber);
  price->add_option("--tol", tol, "absolute price tolerance");

  CLI::App* smile = app.add_subcommand("smile", "Implied-vol smile grid");
  smile->add_option("--model", model_file)->required();
  smile->add_option("--pair", pair)->required();
  smile->add_option("--maturities", maturity_list, "comma-separated years")
      ->required();
  smile->add_option("--strikes", n_strikes)->check(CLI::PositiveNumber);
  smile->add_option("--width", width, "strike range in ATM sigmas");
  smile->add_option("--out", out_file, "output CSV")->required();

  CLI::App* calib =
      app.add_subcommand("calibrate", "Fit parameters to a quote file");
  calib->add_option("--quotes", quotes_file)->required();
  calib->add_option("--config", cfg_file)->required();
  calib->add_option("--model", model_file, "base market file")->required();
  calib->add_option("--out", out_file, "fitted market file");
  calib->add_option("--report", report_file, "per-quote CSV report");
  bool vega_weighted = false;
  calib->add_flag("--vega-weighted", vega_weighted,
                  "weight IV errors by market vega");

  CLI::App* sim = app.add_subcommand("simulate", "Sample exact paths to CSV");
  sim->add_option("--model", model_file)->required();
  sim->add_option("--maturity", maturity)->required()
      ->check(CLI::PositiveNumber);
  sim->add_option("--paths", n_paths)->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed);
  sim->add_option("--steps", steps, "grid intervals (plus the t = 0 row)")
      ->check(CLI::PositiveNumber);
  sim->add_flag("--antithetic", antithetic);
  sim->add_option("--out", out_file)->required();

  CLI::App* swap =
      app.add_subcommand("covswap", "Covariance swap rates and curve");
  swap->add_option("--model", model_file)->required();
  swap->add_option("--i", leg_i)->check(CLI::Range(1, 2));
  swap->add_option("--j", leg_j)->check(CLI::Range(1, 2));
  swap->add_option("--maturities", maturity_list)->required();
  swap->add_option("--out", out_file, "optional curve CSV");

  CLI::App* check = app.add_subcommand(
      "mgfcheck", "Closed-form vs quadrature MGF agreement");
  check->add_option("--model", model_file)->required();
  check->add_option("--maturity", maturity)->check(CLI::PositiveNumber);
  check->add_option("--points", n_points)->check(CLI::PositiveNumber);
  check->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (price->parsed()) {
      return run_price(model_file, pair, strike, maturity, tol);
    }
    if (smile->parsed()) {
      return run_smile(model_file, pair, maturity_list, n_strikes, width,
                       out_file);
    }
    if (calib->parsed()) {
      return run_calibrate(quotes_file, cfg_file, model_file, out_file,
                           report_file, vega_weighted);
    }
    if (sim->parsed()) {
      return run_simulate(model_file, maturity, n_paths, seed, steps,
                          antithetic, out_file);
    }
    if (swap->parsed()) {
      return run_covswap(model_file, leg_i, leg_j, maturity_list, out_file);
    }
    if (check->parsed()) {
      return run_mgfcheck(model_file, maturity, n_points, seed);
    }
  } catch (const msvou::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
