#pragma once

#include <functional>
#include <memory>
#include <string>

#include "msvou/ou_wishart.hpp"

namespace msvou {

// Analytic transform of log-price vector Y_T used by the Fourier pricer.
class MgfSource {
 public:
  virtual ~MgfSource() = default;
  virtual int dim() const = 0;
  // E[e^{y . Y_T}]; callers pin Re y inside the domain first.
  virtual cplx mgf(const CVec& y, double T) const = 0;
  // Exact existence predicate at real part re_y.
  virtual bool in_domain(const Vec& re_y, double T) const = 0;
  // PSD envelope matrix: |Phi(R + iu)| <= Phi(R) exp(-u^T M u / 2).
  virtual Mat decay_matrix(double T) const = 0;
  // Conservative guaranteed strip radius (may be +inf); used for damping
  // defaults only, never as a hard gate.
  virtual double strip_theta(double T) const = 0;
};

// General model via the quadrature transform.
class ModelMgfSource final : public MgfSource {
 public:
  explicit ModelMgfSource(ModelParams params);
  int dim() const override;
  cplx mgf(const CVec& y, double T) const override;
  bool in_domain(const Vec& re_y, double T) const override;
  Mat decay_matrix(double T) const override;
  double strip_theta(double T) const override;
  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
};

// Two-asset OU-Wishart joint law; closed form when a1 == a2 and n == 2.
class Ouw2MgfSource final : public MgfSource {
 public:
  explicit Ouw2MgfSource(OUW2Params params);
  int dim() const override { return 2; }
  cplx mgf(const CVec& y, double T) const override;
  bool in_domain(const Vec& re_y, double T) const override;
  Mat decay_matrix(double T) const override;
  double strip_theta(double T) const override;
  const OUW2Params& params() const { return params_; }

 private:
  OUW2Params params_;
  ModelParams embedded_;
  bool closed_form_;
};

// One marginal of the two-asset law.
class Ouw2MarginalSource final : public MgfSource {
 public:
  Ouw2MarginalSource(OUW2Params params, int asset);
  int dim() const override { return 1; }
  cplx mgf(const CVec& y, double T) const override;
  bool in_domain(const Vec& re_y, double T) const override;
  Mat decay_matrix(double T) const override;
  double strip_theta(double T) const override;

 private:
  OUW2Params params_;
  ModelParams embedded_;
  int asset_;
};

// Fourier transform of a damped payoff plus its damping-feasibility region
// (strict inequalities with a 1e-3 margin).
struct PayoffTransform {
  int dim = 0;
  std::string name;
  std::function<cplx(const CVec&)> fhat;
  std::function<bool(const Vec&)> damping_ok;
};

PayoffTransform transform_call(double K);
PayoffTransform transform_basket_put(double K, int d);
PayoffTransform transform_spread_call(double K);

struct PriceOptions {
  double tol = 1e-9;        // absolute price tolerance target
  long max_evals = 4000000; // total transform evaluations across the run
  int max_doublings = 6;    // truncation growth attempts
};

struct PriceResult {
  double price = 0.0;
  double quad_error = 0.0;
  long evals = 0;
  double truncation = 0.0;  // final per-axis cutoff used
};

// Damped-Fourier price
//   e^{-<R,s> - r T} (2 pi)^{-d} Int e^{-i<u,s>} Phi(R + iu) fhat(iR - u) du
// with s = -log S0 entrywise. Truncation comes from the Gaussian envelope
// with doubling fallback; an undecayed tail raises QuadratureError.
PriceResult price(const MgfSource& source, const PayoffTransform& payoff,
                  const Vec& R, const Vec& S0, double T, double r_dom,
                  const PriceOptions& opts = {});

// Exchange-option (zero-strike spread) price on a single damping line:
//   e^{R (s2 - s1) - s2 - r T} / (2 pi)
//     Int e^{iu (s2 - s1)} Phi(R + iu, 1 - R - iu)
//         / ((R + iu)(R + iu - 1)) du,   R > 1.
PriceResult price_zero_strike_spread(const MgfSource& source, double R,
                                     double S01, double S02, double T,
                                     double r_dom,
                                     const PriceOptions& opts = {});

// Damping defaults. Call: min(1.75, (1 + theta)/2) floored just above 1.
// Basket put: every component -clamp(theta/2, 0.75, 2). Spread: (2, -1/2).
// Zero-strike spread: 2.
double default_damping_call(const MgfSource& marginal, double T);
Vec default_damping_basket(const MgfSource& joint, double T);
Vec default_damping_spread();
double default_damping_zero_strike();

}  // namespace msvou
