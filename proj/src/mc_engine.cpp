#include "msvou/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>

#include "msvou/rng.hpp"

namespace msvou {

namespace {

// Symmetric square root with tolerance clipping of roundoff negatives.
Mat clipped_sqrt(const Mat& V) {
  const Mat Vs = symmetrize(V);
  Eigen::SelfAdjointEigenSolver<Mat> es(Vs);
  const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
  Vec root = es.eigenvalues();
  for (int i = 0; i < root.size(); ++i) {
    if (root(i) < -1e-8 * scale) {
      throw NotPSDError("integrated covariance lost positivity");
    }
    root(i) = std::sqrt(std::max(root(i), 0.0));
  }
  return es.eigenvectors() * root.asDiagonal() *
         es.eigenvectors().transpose();
}

struct Event {
  double t;
  bool is_jump;
  int grid_slot;  // >= 0 when a grid point
};

}  // namespace

PathSimulator::PathSimulator(ModelParams params, double T)
    : params_(std::move(params)), T_(T) {
  if (!(T > 0.0)) throw DomainError("horizon must be positive");
  has_jumps_ = params_.sub.jumps.has_value();
  if (has_jumps_) {
    const WishartJumpSpec& js = *params_.sub.jumps;
    const double n_round = std::round(js.n);
    if (std::abs(js.n - n_round) > 1e-9 || n_round < 1.0) {
      throw UnsupportedSamplingError(
          "exact simulation requires integer Wishart degrees");
    }
    jump_degrees_ = static_cast<int>(n_round);
    sqrt_theta_ = psd_sqrt(js.theta);
  }
  gamma_zero_ = params_.sub.gamma.isZero(0.0);
}

void PathSimulator::simulate_path(std::uint64_t seed, std::uint64_t idx,
                                  PathRecord& rec,
                                  const std::vector<double>* t_grid,
                                  std::vector<GridPoint>* grid_out) const {
  const int d = params_.dim();
  std::mt19937_64 rng = make_stream(seed, idx);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Jump skeleton first, in a fixed draw order.
  std::vector<Event> events;
  if (has_jumps_) {
    std::poisson_distribution<int> pois(params_.sub.jumps->lambda * T_);
    const int n_jumps = pois(rng);
    events.reserve(static_cast<std::size_t>(n_jumps) + 4);
    for (int k = 0; k < n_jumps; ++k) {
      events.push_back({T_ * unif(rng), true, -1});
    }
  }
  if (t_grid) {
    for (std::size_t g = 0; g < t_grid->size(); ++g) {
      const double tg = (*t_grid)[g];
      if (tg >= 0.0 && tg <= T_) {
        events.push_back({tg, false, static_cast<int>(g)});
      }
    }
  }
  events.push_back({T_, false, -1});
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });

  Vec Y = params_.Y0;
  Mat Sigma = params_.Sigma0;
  Mat Splus = Mat::Zero(d, d);
  Mat qcov_jumps = Mat::Zero(d, d);
  Vec gauss_sum = Vec::Zero(d);
  std::vector<double> jump_times;
  int n_jumps_seen = 0;

  Vec z(d);
  double t_cur = 0.0;
  for (const Event& ev : events) {
    const double dt = ev.t - t_cur;
    if (dt > 0.0) {
      const Mat E = params_.A.expm(dt);
      Mat Sigma_end = E * Sigma * E.transpose();
      Mat drift_dt = Mat::Zero(d, d);
      if (!gamma_zero_) {
        Sigma_end += ou_gram(params_.A, params_.sub.gamma, dt);
        drift_dt = params_.sub.gamma * dt;
      }
      const Mat gain = Sigma_end - Sigma - drift_dt;
      const Mat V = params_.A.solve(gain);
      const Mat rootV = clipped_sqrt(V);
      for (int i = 0; i < d; ++i) z(i) = gauss(rng);
      const Vec dW = rootV * z;
      Y += params_.mu * dt + params_.beta.apply(V) + dW;
      gauss_sum += dW;
      Splus += symmetrize(V);
      Sigma = symmetrize(Sigma_end);
      t_cur = ev.t;
    }
    if (ev.is_jump) {
      Mat X(d, jump_degrees_);
      for (int c = 0; c < jump_degrees_; ++c) {
        for (int r = 0; r < d; ++r) X(r, c) = gauss(rng);
      }
      const Mat RX = sqrt_theta_ * X;
      const Mat W = RX * RX.transpose();
      Sigma += W;
      const Vec jy = params_.rho.apply(W);
      Y += jy;
      qcov_jumps += jy * jy.transpose();
      jump_times.push_back(ev.t);
      ++n_jumps_seen;
    }
    if (ev.grid_slot >= 0 && grid_out) {
      GridPoint gp;
      gp.t = ev.t;
      gp.Y = Y;
      gp.Sigma = Sigma;
      gp.gauss_part = gauss_sum;
      grid_out->push_back(std::move(gp));
    }
  }

  rec.Y = Y;
  rec.Sigma = Sigma;
  rec.Sigma_plus = Splus;
  rec.qcov = Splus + qcov_jumps;
  rec.gauss_part = gauss_sum;
  rec.jump_times = std::move(jump_times);
  rec.n_jumps = n_jumps_seen;
}

PathRecord PathSimulator::mirror(const PathRecord& rec) {
  PathRecord out = rec;
  out.Y = rec.Y - 2.0 * rec.gauss_part;
  out.gauss_part = -rec.gauss_part;
  return out;
}

MCStats mc_estimate(const ModelParams& params, double T, const MCConfig& cfg,
                    const std::function<Vec(const PathRecord&)>& f) {
  if (cfg.n_paths == 0) throw DomainError("n_paths must be positive");
  if (cfg.antithetic && cfg.n_paths % 2 != 0) {
    throw DomainError("antithetic runs need an even path count");
  }
  PathSimulator sim(params, T);
  PathRecord rec;
  const std::size_t n_units = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;

  Vec sum, sumsq;
  int k = -1;
  for (std::size_t u = 0; u < n_units; ++u) {
    sim.simulate_path(cfg.seed, u, rec);
    Vec val = f(rec);
    if (cfg.antithetic) {
      const PathRecord twin = PathSimulator::mirror(rec);
      val = 0.5 * (val + f(twin));
    }
    if (k < 0) {
      k = static_cast<int>(val.size());
      sum = Vec::Zero(k);
      sumsq = Vec::Zero(k);
    }
    sum += val;
    sumsq += val.cwiseProduct(val);
  }

  MCStats stats;
  stats.n = n_units;
  stats.mean = sum / static_cast<double>(n_units);
  stats.se = Vec::Zero(k);
  if (n_units > 1) {
    for (int i = 0; i < k; ++i) {
      const double var =
          (sumsq(i) - n_units * stats.mean(i) * stats.mean(i)) /
          static_cast<double>(n_units - 1);
      stats.se(i) = std::sqrt(std::max(var, 0.0) / n_units);
    }
  }
  return stats;
}

PriceEstimate mc_price(const ModelParams& params, double T,
                       const MCConfig& cfg,
                       const std::function<double(const Vec&)>& payoff,
                       double r_dom) {
  const double df = std::exp(-r_dom * T);
  const MCStats stats =
      mc_estimate(params, T, cfg, [&payoff](const PathRecord& rec) {
        Vec v(1);
        v << payoff(rec.Y);
        return v;
      });
  return {df * stats.mean(0), df * stats.se(0)};
}

std::vector<PathRecord> simulate(const ModelParams& params, double T,
                                 const MCConfig& cfg) {
  if (cfg.n_paths == 0) throw DomainError("n_paths must be positive");
  if (cfg.antithetic && cfg.n_paths % 2 != 0) {
    throw DomainError("antithetic runs need an even path count");
  }
  PathSimulator sim(params, T);
  std::vector<PathRecord> out(cfg.n_paths);
  if (cfg.antithetic) {
    for (std::size_t u = 0; u < cfg.n_paths / 2; ++u) {
      sim.simulate_path(cfg.seed, u, out[2 * u]);
      out[2 * u + 1] = PathSimulator::mirror(out[2 * u]);
    }
  } else {
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
      sim.simulate_path(cfg.seed, i, out[i]);
    }
  }
  return out;
}

std::vector<std::vector<GridPoint>> simulate_grid(const ModelParams& params,
                                                  double T,
                                                  const MCConfig& cfg) {
  if (cfg.n_paths == 0) throw DomainError("n_paths must be positive");
  if (cfg.antithetic && cfg.n_paths % 2 != 0) {
    throw DomainError("antithetic runs need an even path count");
  }
  std::vector<double> grid = cfg.t_grid;
  std::sort(grid.begin(), grid.end());
  PathSimulator sim(params, T);
  std::vector<std::vector<GridPoint>> out(cfg.n_paths);
  PathRecord rec;
  const std::size_t n_units = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
  for (std::size_t u = 0; u < n_units; ++u) {
    std::vector<GridPoint> pts;
    sim.simulate_path(cfg.seed, u, rec, &grid, &pts);
    if (cfg.antithetic) {
      std::vector<GridPoint> twin = pts;
      for (GridPoint& gp : twin) {
        gp.Y -= 2.0 * gp.gauss_part;
        gp.gauss_part = -gp.gauss_part;
      }
      out[2 * u] = std::move(pts);
      out[2 * u + 1] = std::move(twin);
    } else {
      out[u] = std::move(pts);
    }
  }
  return out;
}

}  // namespace msvou
