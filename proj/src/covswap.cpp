#include "msvou/covswap.hpp"

#include <cmath>

#include "msvou/rng.hpp"

namespace msvou {

Mat expected_sigma(const ModelParams& p, double T) {
  if (!(T >= 0.0)) throw DomainError("T must be non-negative");
  const Mat E = p.A.expm(T);
  const Mat G = p.A.solve(subordinator_mean(p.sub));
  return symmetrize(E * (p.Sigma0 + G) * E.transpose() - G);
}

Mat expected_integrated_sigma(const ModelParams& p, double T) {
  if (!(T >= 0.0)) throw DomainError("T must be non-negative");
  const Mat EL1 = subordinator_mean(p.sub);
  return symmetrize(p.A.solve(expected_sigma(p, T) - T * EL1 - p.Sigma0));
}

double swap_rate(const ModelParams& p, int i, int j, double T,
                 const SwapRateOptions& opts) {
  const int d = p.dim();
  if (i < 1 || i > d || j < 1 || j > d) {
    throw ShapeError("component indices out of range");
  }
  if (!(T > 0.0)) throw DomainError("T must be positive");
  const int a = i - 1, b = j - 1;
  double K = expected_integrated_sigma(p, T)(a, b);

  if (p.sub.jumps) {
    const WishartJumpSpec& js = *p.sub.jumps;
    double second;  // E[rho(W)_i rho(W)_j]
    if (p.rho.is_diagonal()) {
      const Vec& c = p.rho.diag_coeffs();
      second = c(a) * c(b) * jump_moments(js).raw_diag_second(a, b);
    } else {
      // General leverage rows mix off-diagonal jump entries whose fourth
      // Wishart moments are not assembled here; estimate by sampling.
      if (opts.mc_samples == 0) throw DomainError("mc_samples must be positive");
      std::mt19937_64 rng = make_stream(opts.seed, 0x636f7673ULL);
      double acc = 0.0;
      for (std::size_t k = 0; k < opts.mc_samples; ++k) {
        const Mat W = sample_jump(js, rng);
        const Vec r = p.rho.apply(W);
        acc += r(a) * r(b);
      }
      second = acc / static_cast<double>(opts.mc_samples);
    }
    K += T * js.lambda * second;
  }
  return K;
}

std::vector<std::pair<double, double>> normalized_rate_curve(
    const ModelParams& p, int i, int j, const std::vector<double>& maturities,
    const SwapRateOptions& opts) {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(maturities.size());
  for (double T : maturities) {
    const double r = swap_rate(p, i, j, T, opts) / T;
    curve.emplace_back(T, r >= 0.0 ? std::sqrt(r) : -std::sqrt(-r));
  }
  return curve;
}

}  // namespace msvou
