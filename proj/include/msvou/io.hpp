#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "msvou/calibration.hpp"
#include "msvou/mc_engine.hpp"

namespace msvou {

// `key = value` lines, # comments, blank lines ignored. Duplicate or
// malformed keys raise ConfigError with the offending line number.
std::map<std::string, std::string> load_kv(const std::string& path);

double parse_double(const std::string& text, const std::string& what);

struct MarketSetup {
  OUW2Params params;
  MarketRouting routing;
};

// Model + market description (rates, spots, pair names). Unknown keys are
// rejected. Saving and reloading reproduces every number exactly.
MarketSetup load_market(const std::string& path);
void save_market(const std::string& path, const MarketSetup& setup);

// Quote CSV: pair,maturity_years,strike,type,bid,ask,spot,r_dom,r_for.
std::vector<OptionQuote> load_quotes(const std::string& path);
void save_quotes(const std::string& path,
                 const std::vector<OptionQuote>& quotes);

// Calibration report CSV: pair,T,K,market_iv,model_iv,abs_err.
void save_report(const std::string& path,
                 const std::vector<QuoteReportRow>& rows);

// Swap curve CSV: T,normalized_rate.
void save_curve(const std::string& path,
                const std::vector<std::pair<double, double>>& curve);

struct SmileRow {
  double K, T, model_iv;
};
// Smile CSV: K,T,model_iv.
void save_smile(const std::string& path, const std::vector<SmileRow>& rows);

// Path dump CSV: path,time,Y1..Yd,Sigma11..Sigmadd (row-major Sigma).
void save_paths(const std::string& path,
                const std::vector<std::vector<GridPoint>>& paths);

// Calibration config: variant, max_evals, tol_obj, seed, restarts,
// price_tol, plus init.<name> / lb.<name> / ub.<name> / fix.<name>.
CalibConfig load_calib_config(const std::string& path);

}  // namespace msvou
