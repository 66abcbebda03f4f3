#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "market_fixtures.hpp"
#include "msvou/ou_wishart.hpp"
#include "msvou/rng.hpp"

using namespace msvou;

TEST_CASE("ou_wishart: parameter validation and defaults") {
  OUW2Params p = fixtures::step_params();
  CHECK(p.Y0.isZero());
  CHECK(p.mu(0) == doctest::Approx(0.05957764601747027).epsilon(1e-13));
  CHECK(p.mu(1) == doctest::Approx(0.04867385090431195).epsilon(1e-13));

  OUW2Params bad = fixtures::step_params();
  bad.a1 = 0.5;
  CHECK_THROWS_AS((void)OUW2Params::make(bad), DomainError);

  bad = fixtures::step_params();
  bad.Sigma0 << 0.01, 0.02, 0.02, 0.01;  // indefinite
  CHECK_THROWS_AS((void)OUW2Params::make(bad), NotPSDError);

  bad = fixtures::step_params();
  bad.gamma1 = -0.3;
  CHECK_THROWS_AS((void)OUW2Params::make(bad), NotPSDError);

  bad = fixtures::step_params();
  bad.n = 0.7;
  CHECK_THROWS_AS((void)OUW2Params::make(bad), DomainError);
}

TEST_CASE("ou_wishart: martingale drifts agree with the general machinery") {
  const OUW2Params p = fixtures::step_params();
  const auto [m1, m2] = fx_drifts(p);
  CHECK(m1 == doctest::Approx(0.05957764601747027).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(0.04867385090431195).epsilon(1e-13));

  const ModelParams gen = to_model_params(p);
  Vec r_for(2);
  r_for << p.r_for1, p.r_for2;
  const Vec mu = martingale_mu(gen, p.r_dom, r_for);
  CHECK(std::abs(mu(0) - m1) < 1e-12);
  CHECK(std::abs(mu(1) - m2) < 1e-12);

  // Without leverage the drift is the plain carry.
  OUW2Params flat = fixtures::step_params();
  flat.rho1 = flat.rho2 = 0.0;
  const auto [f1, f2] = fx_drifts(flat);
  CHECK(f1 == doctest::Approx(p.r_dom - p.r_for1).epsilon(1e-14));
  CHECK(f2 == doctest::Approx(p.r_dom - p.r_for2).epsilon(1e-14));

  // Leverage strong enough to kill the exponential moment is rejected.
  OUW2Params infeasible = fixtures::step_params();
  infeasible.mu = Vec::Zero(2);  // skip drift derivation inside make
  infeasible = OUW2Params::make(infeasible);
  infeasible.rho1 = 50.0;  // D_1 = 1 - 2*50*0.011 - 2*0*0.022 < 0
  CHECK_THROWS_AS((void)fx_drifts(infeasible), MartingaleInfeasibleError);
}

TEST_CASE("ou_wishart: quadratic coefficients reproduce the determinant") {
  const OUW2Params p = fixtures::step_params();
  const ModelParams gen = to_model_params(p);
  CVec y(2);
  y << cplx(0.21, 0.45), cplx(-0.13, -0.9);

  const MGFCoefficients c = mgf_coefficients(p, y);
  CHECK(std::abs(c.Delta * c.Delta - (4.0 * c.b0 * c.b2 - c.b1 * c.b1)) <
        1e-12);

  for (double s : {0.0, 0.3, 0.75, 1.2}) {
    const CMat Z = transform_H(gen, y, s) + gen.rho.adjoint(y);
    const cplx det =
        (CMat::Identity(2, 2) - 2.0 * Z * p.Theta.cast<cplx>()).determinant();
    const cplx x = std::exp(2.0 * p.a1 * s);
    const cplx quad = c.b0 + c.b1 * x + c.b2 * x * x;
    CHECK(std::abs(det - quad) < 1e-12);
  }
}

TEST_CASE("ou_wishart: coefficient degenerations") {
  const OUW2Params p = fixtures::step_params();

  // y = 0 gives the constant polynomial 1.
  MGFCoefficients c0 = mgf_coefficients(p, CVec::Zero(2));
  CHECK(std::abs(c0.b0 - 1.0) < 1e-15);
  CHECK(std::abs(c0.b1) < 1e-15);
  CHECK(std::abs(c0.b2) < 1e-15);

  // y = e_1 without leverage: M(y) = y y^T - diag(y) = 0, so again 1.
  OUW2Params flat = fixtures::step_params();
  flat.rho1 = flat.rho2 = 0.0;
  flat.mu = Vec::Zero(2);
  CVec e1(2);
  e1 << 1.0, 0.0;
  MGFCoefficients c1 = mgf_coefficients(flat, e1);
  CHECK(std::abs(c1.b0 - 1.0) < 1e-14);
  CHECK(std::abs(c1.b1) < 1e-14);
  CHECK(std::abs(c1.b2) < 1e-14);

  OUW2Params split = fixtures::step_params();
  split.a2 = -1.7;
  split.mu = Vec::Zero(2);
  CHECK_THROWS_AS((void)mgf_coefficients(split, e1), WrongBranchError);
}

TEST_CASE("ou_wishart: closed-form joint MGF trivials and martingale") {
  const OUW2Params p = fixtures::step_params();
  CVec y(2);
  y << cplx(0.2, 0.1), cplx(-0.1, 0.3);
  CHECK(std::abs(mgf2_closed(p, y, 0.0) - 1.0) < 1e-14);
  CHECK(std::abs(mgf2_closed(p, CVec::Zero(2), 1.0) - 1.0) < 1e-13);

  // Discounted-asset identity, fully closed form.
  for (int asset : {1, 2}) {
    CVec e = CVec::Zero(2);
    e(asset - 1) = 1.0;
    const double rf = asset == 1 ? p.r_for1 : p.r_for2;
    for (double t : {0.25, 1.0, 2.0}) {
      const cplx m = mgf2_closed(p, e, t);
      CHECK(std::abs(m - std::exp((p.r_dom - rf) * t)) < 1e-12);
    }
  }
}

TEST_CASE("ou_wishart: closed form agrees with the quadrature transform") {
  const OUW2Params p = fixtures::step_params();
  const ModelParams gen = to_model_params(p);

  CVec y(2);
  y << cplx(0.5, 0.0), cplx(0.5, 0.0);
  CHECK(std::abs(mgf2_closed(p, y, 1.0) - mgf_unchecked(gen, y, 1.0)) < 1e-8);

  std::mt19937_64 rng = make_stream(404, 0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double theta = strip_radius(gen, 1.0).theta;
  for (int k = 0; k < 12; ++k) {
    Vec re(2);
    re << u(rng), u(rng);
    re *= 0.9 * theta / std::max(re.norm(), 1e-12);
    CVec z(2);
    z << cplx(re(0), 3.0 * u(rng)), cplx(re(1), 3.0 * u(rng));
    const cplx closed = mgf2_closed(p, z, 1.0);
    const cplx quad = mgf_unchecked(gen, z, 1.0);
    CHECK(std::abs(closed - quad) < 1e-8 * std::max(1.0, std::abs(quad)));
  }
}

TEST_CASE("ou_wishart: marginal MGF consistency") {
  const OUW2Params p = fixtures::step_params();

  // Marginalization: the joint MGF on the first axis is the marginal MGF.
  for (double x : {-0.3, 0.2, 0.33}) {
    CVec y(2);
    y << cplx(x, 0.4), cplx(0.0, 0.0);
    CHECK(std::abs(mgf2(p, y, 1.0) - mgf1(p, 1, cplx(x, 0.4), 1.0)) < 1e-10);
    CVec y2(2);
    y2 << cplx(0.0, 0.0), cplx(x, -0.2);
    CHECK(std::abs(mgf2(p, y2, 1.0) - mgf1(p, 2, cplx(x, -0.2), 1.0)) < 1e-10);
  }

  // Distinct mean reversions still admit the marginal closed form.
  OUW2Params split = fixtures::step_params();
  split.a2 = -1.1;
  split.mu = Vec::Zero(2);
  split = OUW2Params::make(split);
  const ModelParams gen = to_model_params(split);
  for (int asset : {1, 2}) {
    const cplx y(0.25, 0.6);
    CVec full = CVec::Zero(2);
    full(asset - 1) = y;
    const cplx closed = mgf1_closed(split, asset, y, 0.8);
    const cplx quad = mgf_unchecked(gen, full, 0.8);
    CHECK(std::abs(closed - quad) < 1e-8);
  }
}

TEST_CASE("ou_wishart: exact domain predicates at the pinned market") {
  const OUW2Params p = fixtures::step_params();
  Vec sp(2);
  sp << 5.0, -4.0;  // used by the zero-strike spread damping
  CHECK(mgf2_in_domain(p, sp, 1.0));
  Vec far(2);
  far << 50.0, 50.0;
  CHECK(!mgf2_in_domain(p, far, 1.0));

  CHECK(mgf1_in_domain(p, 1, 5.0, 1.0));
  CHECK(!mgf1_in_domain(p, 1, -30.0, 1.0));
  CHECK_THROWS_AS((void)mgf1(p, 1, cplx(-30.0, 0.0), 1.0), OutOfStripError);

  CHECK(marginal_strip_theta(p, 1, 1.0) > 0.0);
  CHECK(marginal_strip_theta(p, 2, 1.0) > 0.0);
}

TEST_CASE("ou_wishart: joint dispatcher falls back for split mean reversion") {
  OUW2Params split = fixtures::step_params();
  split.a2 = -1.9;
  split.mu = Vec::Zero(2);
  split = OUW2Params::make(split);
  const ModelParams gen = to_model_params(split);

  CVec y(2);
  y << cplx(0.2, 0.5), cplx(-0.1, -0.2);
  CHECK_THROWS_AS((void)mgf2_closed(split, y, 1.0), WrongBranchError);
  const cplx via_dispatch = mgf2(split, y, 1.0);
  const cplx via_general = mgf_unchecked(gen, y, 1.0);
  CHECK(std::abs(via_dispatch - via_general) < 1e-10);
}

TEST_CASE("ou_wishart: embedding matches the scalar description") {
  const OUW2Params p = fixtures::step_params();
  const ModelParams gen = to_model_params(p);
  CHECK(gen.dim() == 2);
  CHECK(gen.A.matrix()(0, 0) == doctest::Approx(p.a1));
  CHECK(gen.A.matrix()(1, 1) == doctest::Approx(p.a2));
  CHECK(gen.A.matrix()(0, 1) == 0.0);
  CHECK(gen.sub.gamma(0, 0) == doctest::Approx(p.gamma1));
  CHECK(gen.sub.gamma(1, 1) == doctest::Approx(p.gamma2));
  CHECK(gen.sub.jumps.has_value());
  CHECK(gen.sub.jumps->lambda == doctest::Approx(p.lambda));

  Mat X(2, 2);
  X << 0.04, 0.01, 0.01, 0.02;
  const Vec b = gen.beta.apply(X);
  CHECK(b(0) == doctest::Approx(-0.02).epsilon(1e-14));
  CHECK(b(1) == doctest::Approx(-0.01).epsilon(1e-14));
  const Vec r = gen.rho.apply(X);
  CHECK(r(0) == doctest::Approx(p.rho1 * 0.04).epsilon(1e-13));
  CHECK(r(1) == doctest::Approx(p.rho2 * 0.02).epsilon(1e-13));
}

TEST_CASE("ou_wishart: cross leverage enters through the off-diagonal") {
  OUW2Params p = fixtures::step_params();
  p.rho12 = 0.8;
  p.rho21 = -0.3;
  p.mu = Vec::Zero(2);
  p = OUW2Params::make(p);
  const ModelParams gen = to_model_params(p);
  Mat X(2, 2);
  X << 0.04, 0.01, 0.01, 0.02;
  const Vec r = gen.rho.apply(X);
  CHECK(r(0) == doctest::Approx(p.rho1 * 0.04 + 0.8 * 0.01).epsilon(1e-13));
  CHECK(r(1) == doctest::Approx(p.rho2 * 0.02 - 0.3 * 0.01).epsilon(1e-13));

  // The closed form and the embedded transform still agree off-diagonal.
  CVec y(2);
  y << cplx(0.15, 0.2), cplx(-0.1, 0.1);
  const cplx closed = mgf2_closed(p, y, 0.7);
  const cplx quad = mgf_unchecked(gen, y, 0.7);
  CHECK(std::abs(closed - quad) < 1e-8 * std::max(1.0, std::abs(quad)));
}
