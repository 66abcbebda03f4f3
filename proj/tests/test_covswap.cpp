#include "doctest.h"

#include <cmath>

#include "market_fixtures.hpp"
#include "msvou/covswap.hpp"
#include "msvou/quadrature.hpp"

using namespace msvou;

namespace {

ModelParams step_model() { return to_model_params(fixtures::step_params()); }

OUW2Params no_jump_params() {
  OUW2Params p = fixtures::step_params();
  p.lambda = 0.0;
  p.gamma1 = p.gamma2 = 0.0;
  p.mu = Vec();  // re-derive the plain carry
  return OUW2Params::make(p);
}

}  // namespace

TEST_CASE("covswap: expected covariance boundary and stationary behavior") {
  const ModelParams p = step_model();
  CHECK((expected_sigma(p, 0.0) - p.Sigma0).norm() < 1e-14);

  // d/dT E Sigma_T = EL1 + A E Sigma + E Sigma A^T (finite difference).
  const double T = 0.8, h = 1e-6;
  const Mat fd = (expected_sigma(p, T + h) - expected_sigma(p, T - h)) / (2 * h);
  const Mat rhs = subordinator_mean(p.sub) + p.A.apply(expected_sigma(p, T));
  CHECK((fd - rhs).norm() < 1e-6);

  // Long-horizon limit solves EL1 + A S + S A^T = 0.
  const Mat stat = expected_sigma(p, 60.0);
  const Mat resid = subordinator_mean(p.sub) + p.A.apply(stat);
  CHECK(resid.norm() < 1e-10);
}

TEST_CASE("covswap: integrated covariance against direct quadrature") {
  const ModelParams p = step_model();
  const double T = 1.0;
  CHECK(expected_integrated_sigma(p, 0.0).norm() < 1e-14);

  const Mat I = expected_integrated_sigma(p, T);
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      auto f = [&](double s) { return expected_sigma(p, s)(i, j); };
      const auto q = integrate_gk_real(f, 0.0, T, 1e-12, 40000);
      CHECK(I(i, j) == doctest::Approx(q.value.real()).epsilon(1e-10));
    }
  }
}

TEST_CASE("covswap: jump-free rate reduces to the scalar decay formula") {
  const ModelParams p = to_model_params(no_jump_params());
  const double T = 1.0;
  const double s = 2.0 * (-2.392);  // a1 + a2
  const double expect = 0.013 * (std::exp(s * T) - 1.0) / s;
  const double K = swap_rate(p, 1, 2, T);
  CHECK(K == doctest::Approx(expect).epsilon(1e-12));
  CHECK(K == doctest::Approx(0.002694667168341996).epsilon(1e-9));
}

TEST_CASE("covswap: split mean reversion matches the explicit display") {
  OUW2Params q = fixtures::step_params();
  q.a2 = -1.1;
  q.mu = Vec();
  q = OUW2Params::make(q);
  const ModelParams p = to_model_params(q);
  const double T = 1.0;

  const double s = q.a1 + q.a2;
  const double ln = q.lambda * q.n;
  const double leg1 =
      ((std::exp(s * T) - 1.0) * (q.Sigma0(0, 1) + ln * q.Theta(0, 1) / s) -
       T * ln * q.Theta(0, 1)) /
      s;
  // E[rho(W)_1 rho(W)_2] for diagonal leverage.
  const double second =
      q.rho1 * q.rho2 * q.n *
      (2.0 * q.Theta(0, 1) * q.Theta(0, 1) + q.n * q.Theta(0, 0) * q.Theta(1, 1));
  const double expect = leg1 + T * q.lambda * second;

  CHECK(swap_rate(p, 1, 2, T) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("covswap: common jumps induce covariation even for diagonal Theta") {
  OUW2Params q = fixtures::step_params();
  q.Theta = Mat(2, 2);
  q.Theta << 0.011, 0.0, 0.0, 0.063;
  q.Sigma0 = Mat(2, 2);
  q.Sigma0 << 0.019, 0.0, 0.0, 0.017;
  q.mu = Vec();
  q = OUW2Params::make(q);
  const ModelParams p = to_model_params(q);

  // The continuous leg vanishes, but simultaneous jumps still correlate
  // the legs: the jump leg is T lambda rho1 rho2 n^2 Theta11 Theta22.
  const double T = 1.0;
  const double expect =
      T * q.lambda * q.rho1 * q.rho2 * q.n * q.n * q.Theta(0, 0) * q.Theta(1, 1);
  CHECK(swap_rate(p, 1, 2, T) == doctest::Approx(expect).epsilon(1e-12));

  // Kill the jumps too and the rate is exactly zero.
  OUW2Params flat = q;
  flat.lambda = 0.0;
  flat.gamma1 = flat.gamma2 = 0.0;
  flat.mu = Vec();
  flat = OUW2Params::make(flat);
  CHECK(std::abs(swap_rate(to_model_params(flat), 1, 2, T)) < 1e-15);
}

TEST_CASE("covswap: symmetry, sign, and affine dependence on Sigma0") {
  const ModelParams p = step_model();
  const double T = 1.3;
  CHECK(swap_rate(p, 1, 2, T) == doctest::Approx(swap_rate(p, 2, 1, T)));
  CHECK(swap_rate(p, 1, 1, T) > 0.0);
  CHECK(swap_rate(p, 2, 2, T) > 0.0);

  auto with_scaled_sigma0 = [&](double c) {
    OUW2Params q = fixtures::step_params();
    q.Sigma0 = Mat(c * q.Sigma0);
    q.mu = Vec();
    q = OUW2Params::make(q);
    return swap_rate(to_model_params(q), 1, 2, T);
  };
  const double k1 = with_scaled_sigma0(1.0);
  const double k2 = with_scaled_sigma0(2.0);
  const double k3 = with_scaled_sigma0(3.0);
  CHECK(k3 - k2 == doctest::Approx(k2 - k1).epsilon(1e-10));

  CHECK_THROWS_AS((void)swap_rate(p, 0, 1, T), ShapeError);
  CHECK_THROWS_AS((void)swap_rate(p, 1, 3, T), ShapeError);
  CHECK_THROWS_AS((void)swap_rate(p, 1, 2, 0.0), DomainError);
}

TEST_CASE("covswap: general leverage falls back to deterministic sampling") {
  OUW2Params q = fixtures::step_params();
  q.rho12 = 0.6;
  q.rho21 = -0.2;
  q.mu = Vec::Zero(2);
  q = OUW2Params::make(q);
  const ModelParams p = to_model_params(q);
  const double T = 1.0;

  // Exact second moment assembled from Wishart formulas:
  // rho(W)_1 rho(W)_2 = (rho1 W11 + rho12 W12)(rho2 W22 + rho21 W12).
  const double t11 = q.Theta(0, 0), t12 = q.Theta(0, 1), t22 = q.Theta(1, 1);
  const double n = q.n;
  const double e_1122 = n * (2.0 * t12 * t12 + n * t11 * t22);
  const double e_1112 = n * t11 * t12 * (2.0 + n);
  const double e_1222 = n * t12 * t22 * (2.0 + n);
  const double e_1212 = n * (t11 * t22 + t12 * t12) + n * n * t12 * t12;
  const double second = q.rho1 * q.rho2 * e_1122 + q.rho1 * q.rho21 * e_1112 +
                        q.rho12 * q.rho2 * e_1222 + q.rho12 * q.rho21 * e_1212;

  const double base = expected_integrated_sigma(p, T)(0, 1);
  const double expect = base + T * q.lambda * second;

  SwapRateOptions opts;
  opts.mc_samples = 400000;
  const double got = swap_rate(p, 1, 2, T, opts);
  CHECK(got == doctest::Approx(expect).epsilon(2e-2));

  // Deterministic for a fixed seed.
  CHECK(swap_rate(p, 1, 2, T, opts) == doctest::Approx(got).epsilon(1e-15));
}

TEST_CASE("covswap: normalized curve squares back and has the right limit") {
  OUW2Params q = fixtures::step_params();
  q.rho1 = q.rho2 = 0.0;  // leaves the short-end limit sqrt(Sigma0_12)
  q.mu = Vec();
  q = OUW2Params::make(q);
  const ModelParams p = to_model_params(q);

  const std::vector<double> ts = {1e-6, 0.25, 1.0, 2.0};
  const auto curve = normalized_rate_curve(p, 1, 2, ts);
  REQUIRE(curve.size() == ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) {
    CHECK(curve[k].first == ts[k]);
    const double K = swap_rate(p, 1, 2, ts[k]);
    const double v = curve[k].second;
    CHECK(v * v * (K >= 0.0 ? 1.0 : -1.0) * ts[k] == doctest::Approx(K).epsilon(1e-12));
  }
  CHECK(curve.front().second == doctest::Approx(std::sqrt(0.013)).epsilon(1e-5));
}
