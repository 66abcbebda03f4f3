#include "msvou/calibration.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>
#include <utility>

#include "msvou/black_scholes.hpp"
#include "msvou/rng.hpp"

namespace msvou {

QuotePricer::QuotePricer(OUW2Params params, MarketRouting routing,
                         double price_tol)
    : params_(std::move(params)),
      routing_(std::move(routing)),
      m1_(params_, 1),
      m2_(params_, 2),
      joint_(params_) {
  opts_.tol = price_tol;
}

double QuotePricer::price(const OptionQuote& q) const {
  if (q.type != "call") throw ConfigError("only call quotes are supported");
  const double T = q.maturity_years;
  const double K = q.strike;
  if (q.pair == routing_.asset1_pair || q.pair == routing_.asset2_pair) {
    const Ouw2MarginalSource& src =
        (q.pair == routing_.asset1_pair) ? m1_ : m2_;
    Vec R(1), S0(1);
    R << default_damping_call(src, T);
    S0 << q.spot;
    return msvou::price(src, transform_call(K), R, S0, T, params_.r_dom, opts_)
        .price;
  }
  if (q.pair == routing_.cross_pair) {
    if (!(routing_.spot1 > 0.0) || !(routing_.spot2 > 0.0)) {
      throw ConfigError("cross routing needs both leg spots");
    }
    const double usd = price_zero_strike_spread(
                           joint_, default_damping_zero_strike(),
                           routing_.spot1, K * routing_.spot2, T,
                           params_.r_dom, opts_)
                           .price;
    return usd / routing_.spot2;
  }
  throw ConfigError("quote pair does not match the market routing: " + q.pair);
}

double QuotePricer::implied_vol(const OptionQuote& q) const {
  return msvou::implied_vol(price(q), q.spot, q.strike, q.maturity_years,
                            q.r_dom, q.r_for);
}

double quote_rmse(const QuotePricer& pricer,
                  const std::vector<OptionQuote>& quotes, int* infeasible,
                  bool vega_weighted) {
  if (quotes.empty()) throw DomainError("no quotes to fit");
  const int n = static_cast<int>(quotes.size());

  // Each quote fills its own slot, so the work splits across threads without
  // any shared state; the reduction below always runs in index order, which
  // keeps the objective bit-for-bit reproducible regardless of thread count.
  std::vector<double> sq(n, 0.0), w(n, 1.0);
  std::vector<char> ok(n, 0);
  auto eval_one = [&](int i) {
    const OptionQuote& q = quotes[i];
    try {
      const double model_iv = pricer.implied_vol(q);
      const double market_iv = msvou::implied_vol(
          q.mid(), q.spot, q.strike, q.maturity_years, q.r_dom, q.r_for);
      const double e = model_iv - market_iv;
      sq[i] = e * e;
      if (vega_weighted) {
        w[i] = std::max(bs_vega(q.spot, q.strike, q.maturity_years, q.r_dom,
                                q.r_for, market_iv),
                        1e-12);
      }
      ok[i] = 1;
    } catch (const Error&) {
      ok[i] = 0;
    }
  };

  const unsigned hw = std::thread::hardware_concurrency();
  const int n_threads = static_cast<int>(
      std::min<unsigned>(hw == 0 ? 1 : hw, static_cast<unsigned>(n)));
  if (n_threads <= 1) {
    for (int i = 0; i < n; ++i) eval_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          eval_one(i);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }

  int bad = 0;
  double acc = 0.0, wsum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!ok[i]) {
      ++bad;
      continue;
    }
    acc += w[i] * sq[i];
    wsum += w[i];
  }
  if (infeasible) *infeasible = bad;
  if (bad > 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(acc / wsum);
}

namespace {

struct Coord {
  std::string name;
  double lb, ub;
  bool cholesky;  // no box; PSD by construction
};

struct CoordMap {
  std::vector<Coord> coords;
  bool shared_a = false;
  const OUW2Params* base = nullptr;
  std::map<std::string, double> fixed;
  // Optional natural-space box on Theta / Sigma0 entries.
  std::map<std::string, double> nat_lb, nat_ub;

  int size() const { return static_cast<int>(coords.size()); }

  OUW2Params build(const Vec& x, bool* box_ok = nullptr) const {
    OUW2Params p = *base;
    p.mu = Vec();  // re-derive drifts from the new leverage
    std::map<std::string, double> v;
    for (int i = 0; i < size(); ++i) {
      double xi = x(i);
      if (!coords[i].cholesky) xi = std::clamp(xi, coords[i].lb, coords[i].ub);
      v[coords[i].name] = xi;
    }
    for (const auto& [name, val] : fixed) v[name] = val;

    auto get = [&](const std::string& n, double dflt) {
      auto it = v.find(n);
      return it == v.end() ? dflt : it->second;
    };
    p.lambda = get("lambda", p.lambda);
    if (shared_a) {
      const double a = get("a", p.a1);
      p.a1 = a;
      p.a2 = a;
    } else {
      p.a1 = get("a1", p.a1);
      p.a2 = get("a2", p.a2);
    }
    p.rho1 = get("rho1", p.rho1);
    p.rho2 = get("rho2", p.rho2);
    p.rho12 = get("rho12", 0.0);
    p.rho21 = get("rho21", 0.0);
    p.gamma1 = get("gamma1", p.gamma1);
    p.gamma2 = get("gamma2", p.gamma2);

    const double lt11 = v.at("chol_t11"), lt21 = v.at("chol_t21"),
                 lt22 = v.at("chol_t22");
    p.Theta = Mat(2, 2);
    p.Theta << lt11 * lt11, lt11 * lt21, lt11 * lt21, lt21 * lt21 + lt22 * lt22;
    const double ls11 = v.at("chol_s11"), ls21 = v.at("chol_s21"),
                 ls22 = v.at("chol_s22");
    p.Sigma0 = Mat(2, 2);
    p.Sigma0 << ls11 * ls11 + 1e-8, ls11 * ls21, ls11 * ls21,
        ls21 * ls21 + ls22 * ls22 + 1e-8;

    if (box_ok) {
      *box_ok = true;
      auto natural = [&](const std::string& n) -> double {
        if (n == "theta11") return p.Theta(0, 0);
        if (n == "theta12") return p.Theta(0, 1);
        if (n == "theta22") return p.Theta(1, 1);
        if (n == "sigma0_11") return p.Sigma0(0, 0);
        if (n == "sigma0_12") return p.Sigma0(0, 1);
        if (n == "sigma0_22") return p.Sigma0(1, 1);
        return std::numeric_limits<double>::quiet_NaN();
      };
      for (const auto& [n, b] : nat_lb) {
        const double val = natural(n);
        if (!std::isnan(val) && val < b) *box_ok = false;
      }
      for (const auto& [n, b] : nat_ub) {
        const double val = natural(n);
        if (!std::isnan(val) && val > b) *box_ok = false;
      }
    }
    return OUW2Params::make(std::move(p));
  }
};

double box_lb(const std::map<std::string, double>& m, const std::string& n,
              double dflt) {
  auto it = m.find(n);
  return it == m.end() ? dflt : it->second;
}

CoordMap make_coord_map(const CalibConfig& cfg, const OUW2Params& base) {
  const bool shared_a =
      cfg.variant == CalibVariant::A || cfg.variant == CalibVariant::B;
  const bool cross_rho =
      cfg.variant == CalibVariant::B || cfg.variant == CalibVariant::D;

  std::vector<std::string> scalars = {"lambda"};
  if (shared_a) {
    scalars.push_back("a");
  } else {
    scalars.push_back("a1");
    scalars.push_back("a2");
  }
  scalars.push_back("rho1");
  scalars.push_back("rho2");
  if (cross_rho) {
    scalars.push_back("rho12");
    scalars.push_back("rho21");
  }
  scalars.push_back("gamma1");
  scalars.push_back("gamma2");

  CoordMap map;
  map.shared_a = shared_a;
  map.base = &base;
  map.fixed = cfg.fixed;
  for (const std::string n : {"theta11", "theta12", "theta22", "sigma0_11",
                               "sigma0_12", "sigma0_22"}) {
    if (cfg.fixed.count(n)) {
      throw ConfigError("cannot fix Cholesky-backed entry " + n);
    }
    if (cfg.lb.count(n)) map.nat_lb[n] = cfg.lb.at(n);
    if (cfg.ub.count(n)) map.nat_ub[n] = cfg.ub.at(n);
  }

  for (const std::string& n : scalars) {
    if (map.fixed.count(n)) continue;
    Coord c;
    c.name = n;
    c.cholesky = false;
    if (n == "lambda") {
      c.lb = box_lb(cfg.lb, n, 1e-6);
      c.ub = box_lb(cfg.ub, n, 10.0);
    } else if (n == "a" || n == "a1" || n == "a2") {
      c.lb = box_lb(cfg.lb, n, -50.0);
      c.ub = box_lb(cfg.ub, n, -0.01);
    } else if (n == "gamma1" || n == "gamma2") {
      c.lb = box_lb(cfg.lb, n, 0.0);
      c.ub = box_lb(cfg.ub, n, std::numeric_limits<double>::infinity());
    } else {
      c.lb = box_lb(cfg.lb, n, -20.0);
      c.ub = box_lb(cfg.ub, n, 20.0);
    }
    map.coords.push_back(std::move(c));
  }
  for (const std::string n : {"chol_t11", "chol_t21", "chol_t22", "chol_s11",
                               "chol_s21", "chol_s22"}) {
    map.coords.push_back({n, 0.0, 0.0, true});
  }
  return map;
}

// Lower-triangular Cholesky coordinates of a symmetric 2x2 seed.
std::array<double, 3> chol_coords(double v11, double v12, double v22) {
  const double l11 = std::sqrt(std::max(v11, 1e-10));
  const double l21 = v12 / l11;
  const double l22 = std::sqrt(std::max(v22 - l21 * l21, 1e-10));
  return {l11, l21, l22};
}

Vec initial_point(const CoordMap& map, const CalibConfig& cfg) {
  auto need = [&](const std::string& n) {
    auto it = cfg.init.find(n);
    if (it == cfg.init.end()) throw ConfigError("missing init." + n);
    return it->second;
  };
  const auto t = chol_coords(need("theta11"), need("theta12"), need("theta22"));
  const auto s =
      chol_coords(need("sigma0_11"), need("sigma0_12"), need("sigma0_22"));
  Vec x(map.size());
  for (int i = 0; i < map.size(); ++i) {
    const std::string& n = map.coords[i].name;
    if (n == "chol_t11") x(i) = t[0];
    else if (n == "chol_t21") x(i) = t[1];
    else if (n == "chol_t22") x(i) = t[2];
    else if (n == "chol_s11") x(i) = s[0];
    else if (n == "chol_s21") x(i) = s[1];
    else if (n == "chol_s22") x(i) = s[2];
    else x(i) = need(n);
  }
  return x;
}

struct NelderMead {
  std::function<double(const Vec&)> f;
  long max_evals;
  double tol_obj;
  long evals = 0;

  double eval(const Vec& x) {
    ++evals;
    return f(x);
  }

  // Runs until convergence or budget; returns best (x, f).
  std::pair<Vec, double> run(const Vec& x0, const Vec& steps) {
    const int k = static_cast<int>(x0.size());
    std::vector<Vec> xs(k + 1, x0);
    // +inf marks vertices the budget never reached; a value-initialized 0.0
    // would win the sort and report a fit that was never evaluated
    std::vector<double> fs(k + 1, std::numeric_limits<double>::infinity());
    for (int i = 1; i <= k; ++i) xs[i](i - 1) += steps(i - 1);
    for (int i = 0; i <= k && evals < max_evals; ++i) fs[i] = eval(xs[i]);

    std::vector<int> ord(k + 1);
    auto sort_ord = [&] {
      std::iota(ord.begin(), ord.end(), 0);
      std::sort(ord.begin(), ord.end(),
                [&](int a, int b) { return fs[a] < fs[b]; });
    };

    while (evals + 4 < max_evals) {
      sort_ord();
      const int ib = ord[0], iw = ord[k], is = ord[k - 1];
      if (std::isfinite(fs[ib]) && std::isfinite(fs[iw]) &&
          fs[iw] - fs[ib] <= tol_obj) {
        break;
      }
      Vec c = Vec::Zero(k);
      for (int i = 0; i <= k; ++i) {
        if (i != iw) c += xs[i];
      }
      c /= static_cast<double>(k);

      const Vec xr = c + (c - xs[iw]);
      const double fr = eval(xr);
      if (fr < fs[ib]) {
        const Vec xe = c + 2.0 * (c - xs[iw]);
        const double fe = eval(xe);
        if (fe < fr) {
          xs[iw] = xe;
          fs[iw] = fe;
        } else {
          xs[iw] = xr;
          fs[iw] = fr;
        }
      } else if (fr < fs[is]) {
        xs[iw] = xr;
        fs[iw] = fr;
      } else {
        const bool outside = fr < fs[iw];
        const Vec xc = outside ? c + 0.5 * (xr - c) : c + 0.5 * (xs[iw] - c);
        const double fc = eval(xc);
        if (fc < std::min(fr, fs[iw])) {
          xs[iw] = xc;
          fs[iw] = fc;
        } else {
          for (int i = 0; i <= k; ++i) {
            if (i == ib) continue;
            if (evals >= max_evals) break;  // keep xs[i]/fs[i] paired
            xs[i] = xs[ib] + 0.5 * (xs[i] - xs[ib]);
            fs[i] = eval(xs[i]);
          }
        }
      }
    }
    sort_ord();
    return {xs[ord[0]], fs[ord[0]]};
  }
};

}  // namespace

CalibResult calibrate(const std::vector<OptionQuote>& raw_quotes,
                      const MarketRouting& routing, const CalibConfig& config,
                      const OUW2Params& base) {
  if (raw_quotes.empty()) throw CalibrationFailure("no quotes supplied");

  // Screen out quotes whose mid sits outside the static no-arbitrage band;
  // such a market IV does not exist and would poison the objective.
  std::vector<OptionQuote> quotes;
  quotes.reserve(raw_quotes.size());
  int dropped = 0;
  for (const OptionQuote& q : raw_quotes) {
    try {
      (void)msvou::implied_vol(q.mid(), q.spot, q.strike, q.maturity_years,
                               q.r_dom, q.r_for);
      quotes.push_back(q);
    } catch (const ArbitrageError&) {
      ++dropped;
    }
  }
  if (quotes.empty()) {
    throw CalibrationFailure("every quote failed the arbitrage screen");
  }

  const CoordMap map = make_coord_map(config, base);

  auto objective = [&](const Vec& x) -> double {
    try {
      bool box_ok = true;
      const OUW2Params p = map.build(x, &box_ok);
      if (!box_ok) return std::numeric_limits<double>::infinity();
      QuotePricer pricer(p, routing, config.price_tol);
      return quote_rmse(pricer, quotes, nullptr, config.vega_weighted);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const Vec x0 = initial_point(map, config);
  Vec steps(map.size());
  for (int i = 0; i < map.size(); ++i) {
    steps(i) = std::max(0.15 * std::abs(x0(i)), 0.01);
  }

  NelderMead nm{objective, config.max_evals, config.tol_obj};
  Vec best_x = x0;
  double best_f = std::numeric_limits<double>::infinity();
  std::uint64_t jit_state = config.seed;

  Vec start = x0;
  Vec scale = steps;
  for (int round = 0; round <= config.restarts; ++round) {
    if (nm.evals >= config.max_evals) break;
    auto [x, fx] = nm.run(start, scale);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
    // Restart around the incumbent with shrunk, jittered steps.
    start = best_x;
    scale = steps * std::pow(0.3, round + 1);
    for (int i = 0; i < map.size(); ++i) {
      const double u =
          static_cast<double>(splitmix64(jit_state) >> 11) * 0x1.0p-53;
      scale(i) *= 1.0 + 0.5 * (u - 0.5);
    }
  }

  if (!std::isfinite(best_f)) {
    throw CalibrationFailure("no feasible parameter point found");
  }

  CalibResult res;
  res.params = map.build(best_x);
  res.rmse = best_f;
  res.evals = nm.evals;
  res.dropped = dropped;

  QuotePricer pricer(res.params, routing, config.price_tol);
  std::map<std::string, std::pair<double, int>> by_pair;
  for (const OptionQuote& q : quotes) {
    QuoteReportRow row;
    row.pair = q.pair;
    row.T = q.maturity_years;
    row.K = q.strike;
    row.market_iv = msvou::implied_vol(q.mid(), q.spot, q.strike,
                                       q.maturity_years, q.r_dom, q.r_for);
    row.model_iv = pricer.implied_vol(q);
    row.abs_err = std::abs(row.model_iv - row.market_iv);
    auto& agg = by_pair[q.pair];
    agg.first += row.abs_err * row.abs_err;
    agg.second += 1;
    res.report.push_back(std::move(row));
  }
  for (const auto& [pair, agg] : by_pair) {
    res.rmse_by_pair[pair] = std::sqrt(agg.first / agg.second);
  }
  return res;
}

std::vector<OptionQuote> synthesize_quotes(const OUW2Params& params,
                                           const MarketRouting& routing,
                                           const std::vector<double>& maturities,
                                           int strikes_per_smile,
                                           double spread) {
  if (strikes_per_smile < 1) throw DomainError("need at least one strike");
  if (!(routing.spot1 > 0.0) || !(routing.spot2 > 0.0)) {
    throw ConfigError("routing spots must be positive");
  }
  QuotePricer pricer(params, routing, 1e-9);

  struct Leg {
    std::string pair;
    double spot, rd, rf;
  };
  const std::vector<Leg> legs = {
      {routing.asset1_pair, routing.spot1, params.r_dom, params.r_for1},
      {routing.asset2_pair, routing.spot2, params.r_dom, params.r_for2},
      {routing.cross_pair, routing.spot1 / routing.spot2, params.r_for2,
       params.r_for1}};

  std::vector<OptionQuote> out;
  for (const Leg& leg : legs) {
    for (double T : maturities) {
      const double F = leg.spot * std::exp((leg.rd - leg.rf) * T);
      OptionQuote atm;
      atm.pair = leg.pair;
      atm.maturity_years = T;
      atm.strike = F;
      atm.spot = leg.spot;
      atm.r_dom = leg.rd;
      atm.r_for = leg.rf;
      const double sigma_atm = msvou::implied_vol(
          pricer.price(atm), leg.spot, F, T, leg.rd, leg.rf);
      for (int k = 0; k < strikes_per_smile; ++k) {
        const double z =
            (strikes_per_smile == 1)
                ? 0.0
                : -1.5 + 3.0 * k / static_cast<double>(strikes_per_smile - 1);
        OptionQuote q = atm;
        q.strike = F * std::exp(z * sigma_atm * std::sqrt(T));
        const double px = pricer.price(q);
        q.bid = px * (1.0 - 0.5 * spread);
        q.ask = px * (1.0 + 0.5 * spread);
        out.push_back(std::move(q));
      }
    }
  }
  return out;
}

}  // namespace msvou
