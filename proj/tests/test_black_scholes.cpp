#include "doctest.h"

#include <cmath>
#include <complex>

#include "msvou/black_scholes.hpp"
#include "msvou/errors.hpp"
#include "msvou/special_functions.hpp"

using namespace msvou;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("special_functions: normal cdf reference values") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(norm_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(norm_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
  CHECK(norm_cdf(-2.5) == doctest::Approx(0.0062096653257761351).epsilon(1e-10));
  // symmetry
  for (double x : {0.3, 1.7, 4.0}) {
    CHECK(norm_cdf(-x) == doctest::Approx(1.0 - norm_cdf(x)).epsilon(1e-13));
  }
  // tails saturate without overflow
  CHECK(norm_cdf(40.0) == doctest::Approx(1.0));
  CHECK(norm_cdf(-40.0) == doctest::Approx(0.0).epsilon(1e-300));
}

TEST_CASE("special_functions: complex gamma agrees with classical values") {
  using cd = std::complex<double>;
  CHECK(std::abs(cgamma(cd(1.0, 0.0)) - cd(1.0, 0.0)) < 1e-13);
  CHECK(std::abs(cgamma(cd(5.0, 0.0)) - cd(24.0, 0.0)) < 1e-11);
  CHECK(std::abs(cgamma(cd(0.5, 0.0)) - cd(std::sqrt(kPi), 0.0)) < 1e-13);
  // Gamma(1+i), standard tabulated value
  const cd g1i = cgamma(cd(1.0, 1.0));
  CHECK(g1i.real() == doctest::Approx(0.49801566811835607).epsilon(1e-12));
  CHECK(g1i.imag() == doctest::Approx(-0.15494982830181069).epsilon(1e-12));
}

TEST_CASE("special_functions: gamma recurrence and reflection") {
  using cd = std::complex<double>;
  for (cd z : {cd(0.3, 0.8), cd(2.4, -1.1), cd(-1.3, 0.4), cd(5.5, 7.0)}) {
    const cd lhs = cgamma(z + 1.0);
    const cd rhs = z * cgamma(z);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
  }
  // Gamma(z) Gamma(1-z) = pi / sin(pi z)
  const cd z(0.25, 0.6);
  const cd lhs = cgamma(z) * cgamma(cd(1.0, 0.0) - z);
  const cd rhs = kPi / std::sin(kPi * z);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
}

TEST_CASE("special_functions: clog1p matches log(1+z) and keeps precision") {
  using cd = std::complex<double>;
  for (cd z : {cd(0.4, 0.3), cd(-0.2, 0.9), cd(3.0, -4.0)}) {
    const cd direct = std::log(cd(1.0, 0.0) + z);
    CHECK(std::abs(clog1p(z) - direct) < 1e-14 * (1.0 + std::abs(direct)));
  }
  // for tiny z the direct form loses digits; the series value is z - z^2/2
  const cd tiny(3e-13, -2e-13);
  const cd want = tiny - 0.5 * tiny * tiny;
  CHECK(std::abs(clog1p(tiny) - want) < 1e-28);
}

TEST_CASE("black_scholes: textbook call value") {
  // S=K=100, r=5%, sigma=20%, T=1
  const double c = bs_call(100.0, 100.0, 1.0, 0.05, 0.0, 0.2);
  CHECK(c == doctest::Approx(10.450583572185565).epsilon(1e-12));
}

TEST_CASE("black_scholes: zero volatility collapses to discounted intrinsic") {
  const double S0 = 1.3249, T = 0.75, rd = 0.00676, rf = 0.00604;
  const double F = S0 * std::exp((rd - rf) * T);
  const double df = std::exp(-rd * T);
  CHECK(bs_call(S0, 1.30, T, rd, rf, 0.0) ==
        doctest::Approx(df * (F - 1.30)).epsilon(1e-14));
  CHECK(bs_call(S0, 1.40, T, rd, rf, 0.0) == 0.0);
}

TEST_CASE("black_scholes: monotone in volatility and bounded by spot") {
  const double S0 = 1.5333, K = 1.55, T = 0.5, rd = 0.00676, rf = 0.00344;
  double prev = bs_call(S0, K, T, rd, rf, 0.01);
  for (double sigma : {0.05, 0.1, 0.3, 1.0, 3.0}) {
    const double c = bs_call(S0, K, T, rd, rf, sigma);
    CHECK(c > prev);
    prev = c;
  }
  CHECK(prev < S0 * std::exp(-rf * T));
}

TEST_CASE("black_scholes: vega matches a central difference") {
  const double S0 = 1.3249, K = 1.36, T = 1.25, rd = 0.00676, rf = 0.00604;
  for (double sigma : {0.08, 0.2, 0.6}) {
    const double h = 1e-5;
    const double fd = (bs_call(S0, K, T, rd, rf, sigma + h) -
                       bs_call(S0, K, T, rd, rf, sigma - h)) /
                      (2.0 * h);
    CHECK(bs_vega(S0, K, T, rd, rf, sigma) ==
          doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("black_scholes: implied volatility round trip") {
  const double S0 = 1.3249, T = 0.75, rd = 0.00676, rf = 0.00604;
  for (double K : {1.20, 1.3249, 1.45}) {
    for (double sigma : {0.05, 0.2, 0.8, 2.5}) {
      const double price = bs_call(S0, K, T, rd, rf, sigma);
      const double iv = implied_vol(price, S0, K, T, rd, rf);
      CHECK(iv == doctest::Approx(sigma).epsilon(1e-8));
    }
  }
}

TEST_CASE("black_scholes: prices outside the attainable band are rejected") {
  const double S0 = 1.0, K = 1.0, T = 1.0, rd = 0.01, rf = 0.0;
  // below the vanishing-volatility price
  CHECK_THROWS_AS((void)implied_vol(1e-15, S0, K, T, rd, rf), ArbitrageError);
  CHECK_THROWS_AS((void)implied_vol(-0.05, S0, K, T, rd, rf), ArbitrageError);
  // above the large-volatility limit S0 e^{-r_for T} = S0
  CHECK_THROWS_AS((void)implied_vol(S0, S0, K, T, rd, rf), ArbitrageError);
}

TEST_CASE("black_scholes: malformed terms raise DomainError") {
  CHECK_THROWS_AS((void)bs_call(-1.0, 1.0, 1.0, 0.0, 0.0, 0.2), DomainError);
  CHECK_THROWS_AS((void)bs_call(1.0, 0.0, 1.0, 0.0, 0.0, 0.2), DomainError);
  CHECK_THROWS_AS((void)bs_call(1.0, 1.0, -0.5, 0.0, 0.0, 0.2), DomainError);
  CHECK_THROWS_AS((void)bs_call(1.0, 1.0, 1.0, 0.0, 0.0, -0.2), DomainError);
  CHECK_THROWS_AS((void)bs_vega(1.0, 1.0, 1.0, 0.0, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS((void)implied_vol(0.1, 1.0, 1.0, 0.0, 0.0, 0.0), DomainError);
}
