#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "msvou/model.hpp"

namespace msvou {

struct MCConfig {
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  bool antithetic = false;
  std::vector<double> t_grid;  // extra recording times in (0, T]
};

struct PathRecord {
  Vec Y;           // terminal log prices
  Mat Sigma;       // terminal instantaneous covariance
  Mat Sigma_plus;  // integrated covariance over [0, T]
  Mat qcov;        // realized quadratic covariation of Y over [0, T]
  Vec gauss_part;  // accumulated Brownian contribution to Y (mirrored twin
                   // differs from the base path by -2 * gauss_part)
  std::vector<double> jump_times;  // sorted
  int n_jumps = 0;
};

struct GridPoint {
  double t;
  Vec Y;
  Mat Sigma;
  Vec gauss_part;
};

struct MCStats {
  Vec mean;
  Vec se;            // standard error of the mean (per component)
  std::size_t n = 0; // number of i.i.d. units (pairs when antithetic)
};

// Exact-in-law path sampler: the OU covariance flow, its time integral, and
// the Gaussian log-price increment between jumps are all evaluated in closed
// form, so there is no discretization bias. Each path consumes an
// independent RNG stream keyed by (seed, index); results do not depend on
// evaluation order.
class PathSimulator {
 public:
  PathSimulator(ModelParams params, double T);

  const ModelParams& params() const { return params_; }
  double horizon() const { return T_; }

  // Simulates path #idx; optionally records states at the sorted times in
  // *t_grid (entries outside [0, T] are ignored).
  void simulate_path(std::uint64_t seed, std::uint64_t idx, PathRecord& rec,
                     const std::vector<double>* t_grid = nullptr,
                     std::vector<GridPoint>* grid_out = nullptr) const;

  // Mirrored twin of a simulated record (same jumps, negated Gaussians).
  static PathRecord mirror(const PathRecord& rec);

 private:
  ModelParams params_;
  double T_;
  bool has_jumps_;
  int jump_degrees_ = 0;
  Mat sqrt_theta_;
  bool gamma_zero_;
};

// Streaming estimate of E f(path). With antithetic pairing the i.i.d. unit
// is the pair average, n_paths must be even, and path 2k+1 is the mirror of
// path 2k.
MCStats mc_estimate(const ModelParams& params, double T, const MCConfig& cfg,
                    const std::function<Vec(const PathRecord&)>& f);

struct PriceEstimate {
  double value = 0.0;
  double se = 0.0;
};

// Discounted sample mean of a terminal payoff on the log-price vector.
PriceEstimate mc_price(const ModelParams& params, double T,
                       const MCConfig& cfg,
                       const std::function<double(const Vec&)>& payoff,
                       double r_dom);

// Materialized records (small runs, tests, dumps).
std::vector<PathRecord> simulate(const ModelParams& params, double T,
                                 const MCConfig& cfg);

// Per-path state trajectories on cfg.t_grid (include 0 to record the start).
std::vector<std::vector<GridPoint>> simulate_grid(const ModelParams& params,
                                                  double T,
                                                  const MCConfig& cfg);

}  // namespace msvou
