#pragma once

#include <cstdint>
#include <vector>

#include "msvou/model.hpp"

namespace msvou {

// E[Sigma_T] in closed form.
Mat expected_sigma(const ModelParams& p, double T);

// E[integral_0^T Sigma_s ds] in closed form.
Mat expected_integrated_sigma(const ModelParams& p, double T);

struct SwapRateOptions {
  std::size_t mc_samples = 200000;  // jump-moment fallback sample count
  std::uint64_t seed = 20240701;
};

// Covariance swap rate K_ij(T) = E[realized quadratic covariation of
// (Y_i, Y_j) over [0, T]] (annualized by the caller if desired):
//   K = E[Sigma_plus_T]_ij + T lambda E[rho(W)_i rho(W)_j].
// The jump leg is closed-form for diagonal leverage; otherwise it is
// estimated from sampled jumps (hence the options). Indices are 1-based.
double swap_rate(const ModelParams& p, int i, int j, double T,
                 const SwapRateOptions& opts = {});

// Curve T -> sign(K) sqrt(|K| / T) over the given maturities.
std::vector<std::pair<double, double>> normalized_rate_curve(
    const ModelParams& p, int i, int j, const std::vector<double>& maturities,
    const SwapRateOptions& opts = {});

}  // namespace msvou
