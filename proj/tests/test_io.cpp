#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "msvou/errors.hpp"
#include "msvou/io.hpp"
#include "market_fixtures.hpp"

using namespace msvou;

namespace {

std::string write_file(const std::string& name, const std::string& content) {
  std::ofstream out(name);
  out << content;
  return name;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// what() of the ConfigError raised by fn, empty string if none was thrown
template <typename Fn>
std::string config_error_of(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("io: key-value files allow comments and report bad lines") {
  const std::string path = write_file("io_kv_ok.cfg",
                                      "# header comment\n"
                                      "alpha = 1.5\n"
                                      "\n"
                                      "beta = two  # trailing comment\n");
  const auto kv = load_kv(path);
  CHECK(kv.size() == 2);
  CHECK(kv.at("alpha") == "1.5");
  CHECK(kv.at("beta") == "two");

  const std::string bad =
      write_file("io_kv_bad.cfg", "a = 1\nb = 2\nno equals sign here\n");
  const std::string msg = config_error_of([&] { (void)load_kv(bad); });
  CHECK(msg.find(":3") != std::string::npos);

  const std::string dup = write_file("io_kv_dup.cfg", "a = 1\na = 2\n");
  CHECK(config_error_of([&] { (void)load_kv(dup); }).find("duplicate") !=
        std::string::npos);

  const std::string empty_val = write_file("io_kv_empty.cfg", "a =\n");
  CHECK_THROWS_AS((void)load_kv(empty_val), ConfigError);
  CHECK_THROWS_AS((void)load_kv("io_no_such_file.cfg"), ConfigError);

  std::remove(path.c_str());
  std::remove(bad.c_str());
  std::remove(dup.c_str());
  std::remove(empty_val.c_str());
}

TEST_CASE("io: number parsing rejects trailing junk") {
  CHECK(parse_double("2e-3", "x") == 2e-3);
  CHECK(parse_double("-0.5", "x") == -0.5);
  CHECK_THROWS_AS((void)parse_double("1.5x", "x"), ConfigError);
  CHECK_THROWS_AS((void)parse_double("", "x"), ConfigError);
  CHECK_THROWS_AS((void)parse_double("1 2", "x"), ConfigError);
}

TEST_CASE("io: market file survives a save/load round trip exactly") {
  MarketSetup s;
  s.params = fixtures::step_params();
  s.routing = fixtures::step_routing();
  const std::string path = "io_market_rt.cfg";
  save_market(path, s);
  const MarketSetup b = load_market(path);

  const OUW2Params& p = s.params;
  const OUW2Params& q = b.params;
  CHECK(q.lambda == p.lambda);
  CHECK(q.n == p.n);
  CHECK(q.a1 == p.a1);
  CHECK(q.a2 == p.a2);
  CHECK(q.rho1 == p.rho1);
  CHECK(q.rho2 == p.rho2);
  CHECK(q.rho12 == p.rho12);
  CHECK(q.rho21 == p.rho21);
  CHECK(q.gamma1 == p.gamma1);
  CHECK(q.gamma2 == p.gamma2);
  CHECK(q.Theta == p.Theta);
  CHECK(q.Sigma0 == p.Sigma0);
  CHECK(q.r_dom == p.r_dom);
  CHECK(q.r_for1 == p.r_for1);
  CHECK(q.r_for2 == p.r_for2);
  CHECK(q.mu == p.mu);
  CHECK(q.Y0 == p.Y0);
  CHECK(b.routing.spot1 == s.routing.spot1);
  CHECK(b.routing.spot2 == s.routing.spot2);
  CHECK(b.routing.asset1_pair == s.routing.asset1_pair);
  CHECK(b.routing.asset2_pair == s.routing.asset2_pair);
  CHECK(b.routing.cross_pair == s.routing.cross_pair);

  // unknown keys are rejected, missing required keys are named
  std::ofstream(path, std::ios::app) << "bogus = 1\n";
  CHECK(config_error_of([&] { (void)load_market(path); }).find("bogus") !=
        std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("io: market file without jumps omits the jump distribution") {
  const std::string path = write_file("io_market_nojump.cfg",
                                      "lambda = 0\n"
                                      "a1 = -1\n"
                                      "a2 = -1\n"
                                      "rho1 = -3\n"
                                      "rho2 = -0.5\n"
                                      "gamma1 = 0.02\n"
                                      "gamma2 = 0.01\n"
                                      "sigma0_11 = 0.04\n"
                                      "sigma0_12 = 0\n"
                                      "sigma0_22 = 0.03\n"
                                      "r_dom = 0.01\n"
                                      "r_for1 = 0\n"
                                      "r_for2 = 0\n"
                                      "spot1 = 1\n"
                                      "spot2 = 1\n");
  const MarketSetup s = load_market(path);
  CHECK(s.params.lambda == 0.0);
  CHECK(s.params.Theta.isZero(0.0));  // canonicalized to a zero matrix
  CHECK(s.params.mu(0) == 0.01);  // r_dom - r_for1, no jump compensation

  const std::string missing = write_file("io_market_missing.cfg",
                                         "lambda = 0\na1 = -1\na2 = -1\n");
  CHECK(config_error_of([&] { (void)load_market(missing); })
            .find("missing key") != std::string::npos);
  std::remove(path.c_str());
  std::remove(missing.c_str());
}

TEST_CASE("io: quote csv survives a round trip exactly") {
  std::vector<OptionQuote> quotes(2);
  quotes[0].pair = "EURUSD";
  quotes[0].maturity_years = 0.7512345678901234;
  quotes[0].strike = 1.3333333333333333;
  quotes[0].type = "call";
  quotes[0].bid = 0.0123456789012345678;
  quotes[0].ask = 0.0123956789012345678;
  quotes[0].spot = 1.3249;
  quotes[0].r_dom = 0.00676;
  quotes[0].r_for = 0.00604;
  quotes[1] = quotes[0];
  quotes[1].pair = "EURGBP";
  quotes[1].strike = 0.8641;

  const std::string path = "io_quotes_rt.csv";
  save_quotes(path, quotes);
  const std::vector<OptionQuote> b = load_quotes(path);
  REQUIRE(b.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(b[i].pair == quotes[i].pair);
    CHECK(b[i].maturity_years == quotes[i].maturity_years);
    CHECK(b[i].strike == quotes[i].strike);
    CHECK(b[i].type == quotes[i].type);
    CHECK(b[i].bid == quotes[i].bid);
    CHECK(b[i].ask == quotes[i].ask);
    CHECK(b[i].spot == quotes[i].spot);
    CHECK(b[i].r_dom == quotes[i].r_dom);
    CHECK(b[i].r_for == quotes[i].r_for);
  }
  std::remove(path.c_str());
}

TEST_CASE("io: quote csv rejects malformed input") {
  const std::string header =
      "pair,maturity_years,strike,type,bid,ask,spot,r_dom,r_for\n";
  const std::string h = write_file("io_q_hdr.csv", "pair,T,K\nx\n");
  CHECK_THROWS_AS((void)load_quotes(h), ConfigError);

  const std::string cols =
      write_file("io_q_cols.csv", header + "EURUSD,1,1.3,call,0.1,0.2\n");
  CHECK(config_error_of([&] { (void)load_quotes(cols); }).find(":2") !=
        std::string::npos);

  const std::string put = write_file(
      "io_q_put.csv", header + "EURUSD,1,1.3,put,0.1,0.2,1.32,0,0\n");
  CHECK_THROWS_AS((void)load_quotes(put), ConfigError);

  const std::string crossed = write_file(
      "io_q_crossed.csv", header + "EURUSD,1,1.3,call,0.3,0.2,1.32,0,0\n");
  CHECK_THROWS_AS((void)load_quotes(crossed), ConfigError);

  // blank lines are fine
  const std::string blank = write_file(
      "io_q_blank.csv",
      header + "\nEURUSD,1,1.3,call,0.1,0.2,1.32,0,0\n\n");
  CHECK(load_quotes(blank).size() == 1);

  for (const std::string& f : {h, cols, put, crossed, blank}) {
    std::remove(f.c_str());
  }
}

TEST_CASE("io: tabular writers emit headers and one row per entry") {
  std::vector<QuoteReportRow> rows(2);
  rows[0] = {"EURUSD", 0.5, 1.32, 0.101, 0.102, 0.001};
  rows[1] = {"EURGBP", 1.0, 0.86, 0.095, 0.094, 0.001};
  save_report("io_report.csv", rows);
  auto lines = read_lines("io_report.csv");
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "pair,T,K,market_iv,model_iv,abs_err");
  CHECK(lines[1].substr(0, 7) == "EURUSD,");

  save_curve("io_curve.csv", {{0.5, 0.11}, {1.0, 0.12}});
  lines = read_lines("io_curve.csv");
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "T,normalized_rate");

  save_smile("io_smile.csv", {SmileRow{1.30, 0.5, 0.1012}});
  lines = read_lines("io_smile.csv");
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "K,T,model_iv");
  const auto smile_cells = split(lines[1]);
  REQUIRE(smile_cells.size() == 3);
  CHECK(parse_double(smile_cells[2], "iv") == 0.1012);

  std::remove("io_report.csv");
  std::remove("io_curve.csv");
  std::remove("io_smile.csv");
}

TEST_CASE("io: path dump flattens states in block order") {
  GridPoint a;
  a.t = 0.0;
  a.Y = Vec::Zero(2);
  a.Sigma = Mat(2, 2);
  a.Sigma << 0.019, 0.013, 0.013, 0.017;
  GridPoint b = a;
  b.t = 0.5;
  b.Y << 0.01, -0.02;
  std::vector<std::vector<GridPoint>> paths = {{a, b}, {a}};

  const std::string path = "io_paths.csv";
  save_paths(path, paths);
  const auto lines = read_lines(path);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "path,time,Y1,Y2,Sigma11,Sigma12,Sigma21,Sigma22");
  CHECK(lines[1].substr(0, 2) == "0,");
  CHECK(lines[3].substr(0, 2) == "1,");
  const auto row = split(lines[2]);  // second state of the first path
  REQUIRE(row.size() == 8);
  CHECK(parse_double(row[1], "t") == 0.5);
  CHECK(parse_double(row[2], "Y1") == 0.01);
  CHECK(parse_double(row[3], "Y2") == -0.02);
  CHECK(parse_double(row[4], "S11") == 0.019);
  CHECK(parse_double(row[5], "S12") == 0.013);
  CHECK(parse_double(row[7], "S22") == 0.017);
  std::remove(path.c_str());
}

TEST_CASE("io: calibration config covers every key group") {
  const std::string path = write_file("io_calib.cfg",
                                      "variant = C\n"
                                      "max_evals = 1200\n"
                                      "tol_obj = 1e-9\n"
                                      "seed = 42\n"
                                      "restarts = 3\n"
                                      "price_tol = 1e-6\n"
                                      "vega_weighted = 1\n"
                                      "init.lambda = 0.5\n"
                                      "init.a1 = -2\n"
                                      "lb.lambda = 0.01\n"
                                      "ub.lambda = 4\n"
                                      "fix.gamma2 = 0\n");
  const CalibConfig cfg = load_calib_config(path);
  CHECK(cfg.variant == CalibVariant::C);
  CHECK(cfg.max_evals == 1200);
  CHECK(cfg.tol_obj == 1e-9);
  CHECK(cfg.seed == 42);
  CHECK(cfg.restarts == 3);
  CHECK(cfg.price_tol == 1e-6);
  CHECK(cfg.vega_weighted == true);
  CHECK(cfg.init.at("lambda") == 0.5);
  CHECK(cfg.init.at("a1") == -2.0);
  CHECK(cfg.lb.at("lambda") == 0.01);
  CHECK(cfg.ub.at("lambda") == 4.0);
  CHECK(cfg.fixed.at("gamma2") == 0.0);
  std::remove(path.c_str());

  const std::string badv = write_file("io_calib_badv.cfg", "variant = Z\n");
  CHECK_THROWS_AS((void)load_calib_config(badv), ConfigError);
  const std::string badn =
      write_file("io_calib_badn.cfg", "init.bogus = 1\n");
  CHECK(config_error_of([&] { (void)load_calib_config(badn); })
            .find("unknown parameter name") != std::string::npos);
  const std::string badg = write_file("io_calib_badg.cfg", "foo.lambda = 1\n");
  CHECK_THROWS_AS((void)load_calib_config(badg), ConfigError);
  const std::string badk = write_file("io_calib_badk.cfg", "foo = 1\n");
  CHECK(config_error_of([&] { (void)load_calib_config(badk); })
            .find("unknown key") != std::string::npos);
  std::remove(badv.c_str());
  std::remove(badn.c_str());
  std::remove(badg.c_str());
  std::remove(badk.c_str());
}
