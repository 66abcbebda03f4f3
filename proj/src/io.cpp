#include "msvou/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace msvou {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << std::setprecision(17);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number for " + what + ": '" + text + "'");
  }
}

std::map<std::string, std::string> load_kv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": empty key or value");
    }
    if (!kv.emplace(key, val).second) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": duplicate key " + key);
    }
  }
  return kv;
}

namespace {

class KvReader {
 public:
  KvReader(std::map<std::string, std::string> kv, std::string path)
      : kv_(std::move(kv)), path_(std::move(path)) {}

  double number(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError(path_ + ": missing key " + key);
    used_.insert(key);
    return parse_double(it->second, key);
  }
  double number_or(const std::string& key, double dflt) {
    return kv_.count(key) ? number(key) : dflt;
  }
  std::string text_or(const std::string& key, const std::string& dflt) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    used_.insert(key);
    return it->second;
  }
  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  void reject_unknown() const {
    for (const auto& [key, val] : kv_) {
      if (!used_.count(key)) {
        throw ConfigError(path_ + ": unknown key " + key);
      }
    }
  }

 private:
  std::map<std::string, std::string> kv_;
  std::string path_;
  std::set<std::string> used_;
};

}  // namespace

MarketSetup load_market(const std::string& path) {
  KvReader r(load_kv(path), path);
  OUW2Params p;
  p.lambda = r.number("lambda");
  p.n = r.number_or("n", 2.0);
  p.a1 = r.number("a1");
  p.a2 = r.number("a2");
  p.rho1 = r.number("rho1");
  p.rho2 = r.number("rho2");
  p.rho12 = r.number_or("rho12", 0.0);
  p.rho21 = r.number_or("rho21", 0.0);
  p.gamma1 = r.number("gamma1");
  p.gamma2 = r.number("gamma2");
  if (p.lambda > 0.0 || r.has("theta11")) {
    p.Theta = Mat(2, 2);
    p.Theta << r.number("theta11"), r.number("theta12"), r.number("theta12"),
        r.number("theta22");
  }
  p.Sigma0 = Mat(2, 2);
  p.Sigma0 << r.number("sigma0_11"), r.number("sigma0_12"),
      r.number("sigma0_12"), r.number("sigma0_22");
  p.r_dom = r.number("r_dom");
  p.r_for1 = r.number("r_for1");
  p.r_for2 = r.number("r_for2");
  if (r.has("mu1") || r.has("mu2")) {
    p.mu = Vec(2);
    p.mu << r.number("mu1"), r.number("mu2");
  }
  if (r.has("y0_1") || r.has("y0_2")) {
    p.Y0 = Vec(2);
    p.Y0 << r.number("y0_1"), r.number("y0_2");
  }

  MarketSetup setup{OUW2Params::make(std::move(p)), MarketRouting{}};
  setup.routing.spot1 = r.number("spot1");
  setup.routing.spot2 = r.number("spot2");
  setup.routing.asset1_pair = r.text_or("pair1", "EURUSD");
  setup.routing.asset2_pair = r.text_or("pair2", "GBPUSD");
  setup.routing.cross_pair = r.text_or("cross", "EURGBP");
  r.reject_unknown();
  return setup;
}

void save_market(const std::string& path, const MarketSetup& setup) {
  const OUW2Params& p = setup.params;
  std::ofstream out = open_out(path);
  out << "a1 = " << p.a1 << "\n";
  out << "a2 = " << p.a2 << "\n";
  out << "cross = " << setup.routing.cross_pair << "\n";
  out << "gamma1 = " << p.gamma1 << "\n";
  out << "gamma2 = " << p.gamma2 << "\n";
  out << "lambda = " << p.lambda << "\n";
  out << "mu1 = " << p.mu(0) << "\n";
  out << "mu2 = " << p.mu(1) << "\n";
  out << "n = " << p.n << "\n";
  out << "pair1 = " << setup.routing.asset1_pair << "\n";
  out << "pair2 = " << setup.routing.asset2_pair << "\n";
  out << "r_dom = " << p.r_dom << "\n";
  out << "r_for1 = " << p.r_for1 << "\n";
  out << "r_for2 = " << p.r_for2 << "\n";
  out << "rho1 = " << p.rho1 << "\n";
  out << "rho12 = " << p.rho12 << "\n";
  out << "rho2 = " << p.rho2 << "\n";
  out << "rho21 = " << p.rho21 << "\n";
  out << "sigma0_11 = " << p.Sigma0(0, 0) << "\n";
  out << "sigma0_12 = " << p.Sigma0(0, 1) << "\n";
  out << "sigma0_22 = " << p.Sigma0(1, 1) << "\n";
  out << "spot1 = " << setup.routing.spot1 << "\n";
  out << "spot2 = " << setup.routing.spot2 << "\n";
  out << "theta11 = " << p.Theta(0, 0) << "\n";
  out << "theta12 = " << p.Theta(0, 1) << "\n";
  out << "theta22 = " << p.Theta(1, 1) << "\n";
  out << "y0_1 = " << p.Y0(0) << "\n";
  out << "y0_2 = " << p.Y0(1) << "\n";
}

std::vector<OptionQuote> load_quotes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  const std::string header =
      "pair,maturity_years,strike,type,bid,ask,spot,r_dom,r_for";
  if (trim(line) != header) {
    throw ConfigError(path + ": unexpected header, want '" + header + "'");
  }
  std::vector<OptionQuote> quotes;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 9) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 9 columns");
    }
    OptionQuote q;
    q.pair = cells[0];
    q.maturity_years = parse_double(cells[1], "maturity_years");
    q.strike = parse_double(cells[2], "strike");
    q.type = cells[3];
    if (q.type != "call") {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": unsupported option type '" + q.type + "'");
    }
    q.bid = parse_double(cells[4], "bid");
    q.ask = parse_double(cells[5], "ask");
    q.spot = parse_double(cells[6], "spot");
    q.r_dom = parse_double(cells[7], "r_dom");
    q.r_for = parse_double(cells[8], "r_for");
    if (q.bid > q.ask) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": bid above ask");
    }
    quotes.push_back(std::move(q));
  }
  return quotes;
}

void save_quotes(const std::string& path,
                 const std::vector<OptionQuote>& quotes) {
  std::ofstream out = open_out(path);
  out << "pair,maturity_years,strike,type,bid,ask,spot,r_dom,r_for\n";
  for (const OptionQuote& q : quotes) {
    out << q.pair << ',' << q.maturity_years << ',' << q.strike << ','
        << q.type << ',' << q.bid << ',' << q.ask << ',' << q.spot << ','
        << q.r_dom << ',' << q.r_for << '\n';
  }
}

void save_report(const std::string& path,
                 const std::vector<QuoteReportRow>& rows) {
  std::ofstream out = open_out(path);
  out << "pair,T,K,market_iv,model_iv,abs_err\n";
  for (const QuoteReportRow& r : rows) {
    out << r.pair << ',' << r.T << ',' << r.K << ',' << r.market_iv << ','
        << r.model_iv << ',' << r.abs_err << '\n';
  }
}

void save_curve(const std::string& path,
                const std::vector<std::pair<double, double>>& curve) {
  std::ofstream out = open_out(path);
  out << "T,normalized_rate\n";
  for (const auto& [T, rate] : curve) out << T << ',' << rate << '\n';
}

void save_smile(const std::string& path, const std::vector<SmileRow>& rows) {
  std::ofstream out = open_out(path);
  out << "K,T,model_iv\n";
  for (const SmileRow& r : rows) {
    out << r.K << ',' << r.T << ',' << r.model_iv << '\n';
  }
}

void save_paths(const std::string& path,
                const std::vector<std::vector<GridPoint>>& paths) {
  std::ofstream out = open_out(path);
  int d = 0;
  for (const auto& p : paths) {
    if (!p.empty()) {
      d = static_cast<int>(p.front().Y.size());
      break;
    }
  }
  out << "path,time";
  for (int i = 1; i <= d; ++i) out << ",Y" << i;
  for (int i = 1; i <= d; ++i) {
    for (int j = 1; j <= d; ++j) out << ",Sigma" << i << j;
  }
  out << '\n';
  for (std::size_t pidx = 0; pidx < paths.size(); ++pidx) {
    for (const GridPoint& gp : paths[pidx]) {
      out << pidx << ',' << gp.t;
      for (int i = 0; i < d; ++i) out << ',' << gp.Y(i);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) out << ',' << gp.Sigma(i, j);
      }
      out << '\n';
    }
  }
}

CalibConfig load_calib_config(const std::string& path) {
  const auto kv = load_kv(path);
  CalibConfig cfg;
  static const std::set<std::string> names = {
      "lambda",  "a",        "a1",        "a2",        "rho1",
      "rho2",    "rho12",    "rho21",     "gamma1",    "gamma2",
      "theta11", "theta12",  "theta22",   "sigma0_11", "sigma0_12",
      "sigma0_22"};
  for (const auto& [key, val] : kv) {
    if (key == "variant") {
      if (val == "A") cfg.variant = CalibVariant::A;
      else if (val == "B") cfg.variant = CalibVariant::B;
      else if (val == "C") cfg.variant = CalibVariant::C;
      else if (val == "D") cfg.variant = CalibVariant::D;
      else throw ConfigError(path + ": unknown variant " + val);
    } else if (key == "max_evals") {
      cfg.max_evals = static_cast<long>(parse_double(val, key));
    } else if (key == "tol_obj") {
      cfg.tol_obj = parse_double(val, key);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_double(val, key));
    } else if (key == "restarts") {
      cfg.restarts = static_cast<int>(parse_double(val, key));
    } else if (key == "price_tol") {
      cfg.price_tol = parse_double(val, key);
    } else if (key == "vega_weighted") {
      cfg.vega_weighted = parse_double(val, key) != 0.0;
    } else {
      const auto dot = key.find('.');
      if (dot == std::string::npos) {
        throw ConfigError(path + ": unknown key " + key);
      }
      const std::string group = key.substr(0, dot);
      const std::string name = key.substr(dot + 1);
      if (!names.count(name)) {
        throw ConfigError(path + ": unknown parameter name " + name);
      }
      const double v = parse_double(val, key);
      if (group == "init") cfg.init[name] = v;
      else if (group == "lb") cfg.lb[name] = v;
      else if (group == "ub") cfg.ub[name] = v;
      else if (group == "fix") cfg.fixed[name] = v;
      else throw ConfigError(path + ": unknown key group " + group);
    }
  }
  return cfg;
}

}  // namespace msvou
