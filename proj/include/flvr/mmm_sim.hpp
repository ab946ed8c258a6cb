#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace flvr {

using Rng = std::mt19937_64;

/// Independent stream for path `path` under `seed`; identical regardless of
/// the order in which paths are generated.
Rng path_rng(std::uint64_t seed, std::uint64_t path);

struct SimConfig {
  double s0 = 1.0;        ///< initial discounted index
  double tau0 = 0.0;      ///< initial activity time
  double slope = 0.05;    ///< activity time slope a per year
  double horizon = 1.0;   ///< years
  double step = 1.0 / 252.0;
  int n_paths = 1;
  std::uint64_t seed = 1;
};

/// Throws ConfigError unless s0 > 0, slope > 0, step > 0 and horizon >= step.
void validate(const SimConfig& config);

struct SimPath {
  Eigen::VectorXd times;  ///< years from 0
  Eigen::VectorXd s;
  Eigen::VectorXd tau;    ///< tau0 + slope * t
  Eigen::VectorXd phi;    ///< exp(tau)
};

/// One exact step of a dimension-4 squared Bessel process over activity-clock
/// increment dphi: dphi * chi'^2_4(x / dphi), drawn as a Poisson(x / (2 dphi))
/// mixture of Gamma(2 + N, 2) variables.
double sample_besq4_transition(double x, double dphi, Rng& rng);

/// Time grid 0, step, 2 step, ..., horizon (the last step is shortened if
/// horizon is not a multiple of step).
Eigen::VectorXd time_grid(const SimConfig& config);

SimPath simulate_path(const SimConfig& config, std::uint64_t path);
std::vector<SimPath> simulate_paths(const SimConfig& config);

/// Index volatility sqrt(4 e^tau a / S) under the benchmark-neutral measure.
inline double index_volatility(double s, double tau, double slope) {
  return std::sqrt(4.0 * std::exp(tau) * slope / s);
}

struct McPrice {
  double estimate = 0.0;
  double std_error = 0.0;
  double closed_form = 0.0;
  double z_score = 0.0;
  std::size_t samples = 0;
};

/// Monte-Carlo S_t E[1/S_T] from terminal draws, against the closed form
/// 1 - exp(-S_t / (2 (e^{tau_T} - e^{tau_t}))).
McPrice mc_zcb_price(const Eigen::Ref<const Eigen::VectorXd>& terminal, double s_t, double tau_t,
                     double tau_T);

/// Same, along simulated paths between grid indices t < T: averages
/// S_t / S_T and compares with the average closed-form price at t.
McPrice mc_zcb_price(const std::vector<SimPath>& paths, Eigen::Index t, Eigen::Index T);

/// n draws of S_T given S_t, one exact transition each, from a single stream for `seed`.
Eigen::VectorXd sample_terminal(double s_t, double tau_t, double tau_T, int n, std::uint64_t seed);

/// A (S_t, tau_t, tau_T) triple for the Monte-Carlo price check.
struct OraclePoint {
  double s_t = 1.0;
  double tau_t = 0.0;
  double tau_T = 1.0;
};

/// Points with e^{tau_T} - e^{tau_t} = k S_t / 2 for k in {1/4, 1/2, 1, 2, 4};
/// k = 1 puts the closed form at 1 - e^{-1}.
std::vector<OraclePoint> default_oracle_points(double s_t, double tau_t);

/// Runs mc_zcb_price on `n` fresh terminal draws per point; point k uses seed + k.
std::vector<McPrice> run_oracle(const std::vector<OraclePoint>& points, int n, std::uint64_t seed);

struct ConvergenceRow {
  double step = 0.0;
  int rebalances = 0;
  double mean_max_error = 0.0;
  double std_error = 0.0;
};

/// Hedges the zero-coupon bond maturing at the horizon along exact-model paths,
/// once per step size. Paths are simulated at the finest step and subsampled,
/// so every step size sees the same trajectories. Each step size must be an
/// integer multiple of the finest one, and sizes must be decreasing.
std::vector<ConvergenceRow> hedge_convergence_experiment(const SimConfig& config,
                                                         const std::vector<double>& step_sizes);

}  // namespace flvr
