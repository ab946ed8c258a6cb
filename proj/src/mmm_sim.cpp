#include "flvr/mmm_sim.hpp"

#include <cmath>

#include "flvr/azcb.hpp"
#include "flvr/errors.hpp"

namespace flvr {

Rng path_rng(std::uint64_t seed, std::uint64_t path) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  return Rng(seq);
}

void validate(const SimConfig& c) {
  if (!(c.s0 > 0.0)) throw ConfigError("sim: s0 must be positive");
  if (!(c.slope > 0.0)) throw ConfigError("sim: slope must be positive");
  if (!(c.step > 0.0)) throw ConfigError("sim: step must be positive");
  if (!(c.horizon >= c.step)) throw ConfigError("sim: horizon must be at least one step");
  if (!std::isfinite(c.tau0)) throw ConfigError("sim: tau0 must be finite");
  if (c.n_paths < 1) throw ConfigError("sim: need at least one path");
}

double sample_besq4_transition(double x, double dphi, Rng& rng) {
  if (!(x > 0.0 && dphi > 0.0)) throw NumericalError("besq4: need x > 0 and dphi > 0");
  const double half_noncentrality = 0.5 * x / dphi;
  std::poisson_distribution<long long> poisson(half_noncentrality);
  const long long n = poisson(rng);
  std::gamma_distribution<double> gamma(2.0 + static_cast<double>(n), 2.0);
  double y = gamma(rng);
  // A dimension-4 process never reaches 0; guard against a rounded-to-zero draw.
  while (!(y > 0.0)) y = gamma(rng);
  return dphi * y;
}

Eigen::VectorXd time_grid(const SimConfig& c) {
  validate(c);
  const auto k = static_cast<Eigen::Index>(std::ceil(c.horizon / c.step - 1e-9));
  Eigen::VectorXd t(k + 1);
  for (Eigen::Index i = 0; i < k; ++i) t[i] = static_cast<double>(i) * c.step;
  t[k] = c.horizon;
  return t;
}

SimPath simulate_path(const SimConfig& c, std::uint64_t path) {
  SimPath p;
  p.times = time_grid(c);
  p.tau = (c.tau0 + c.slope * p.times.array()).matrix();
  p.phi = p.tau.array().exp().matrix();
  p.s.resize(p.times.size());
  p.s[0] = c.s0;
  Rng rng = path_rng(c.seed, path);
  for (Eigen::Index i = 1; i < p.s.size(); ++i)
    p.s[i] = sample_besq4_transition(p.s[i - 1], p.phi[i] - p.phi[i - 1], rng);
  return p;
}

std::vector<SimPath> simulate_paths(const SimConfig& c) {
  validate(c);
  std::vector<SimPath> out;
  out.reserve(static_cast<std::size_t>(c.n_paths));
  for (int j = 0; j < c.n_paths; ++j) out.push_back(simulate_path(c, static_cast<std::uint64_t>(j)));
  return out;
}

namespace {

McPrice finish(double sum, double sum_sq, std::size_t n, double closed_form) {
  McPrice r;
  r.samples = n;
  const double dn = static_cast<double>(n);
  r.estimate = sum / dn;
  const double var = n > 1 ? std::max(sum_sq - dn * r.estimate * r.estimate, 0.0) / (dn - 1.0) : 0.0;
  r.std_error = std::sqrt(var / dn);
  r.closed_form = closed_form;
  r.z_score = r.std_error > 0.0 ? (r.estimate - closed_form) / r.std_error : 0.0;
  return r;
}

}  // namespace

McPrice mc_zcb_price(const Eigen::Ref<const Eigen::VectorXd>& terminal, double s_t, double tau_t,
                     double tau_T) {
  if (terminal.size() == 0) throw ConfigError("mc_zcb_price: no samples");
  const Eigen::ArrayXd x = s_t / terminal.array();
  return finish(x.sum(), x.square().sum(), static_cast<std::size_t>(x.size()),
                azcb_price(s_t, tau_t, tau_T));
}

McPrice mc_zcb_price(const std::vector<SimPath>& paths, Eigen::Index t, Eigen::Index T) {
  if (paths.empty()) throw ConfigError("mc_zcb_price: no paths");
  if (!(t >= 0 && t < T && T < paths.front().s.size())) throw ConfigError("mc_zcb_price: need t < T on the grid");
  double sum = 0.0, sum_sq = 0.0, closed = 0.0;
  for (const auto& p : paths) {
    const double x = p.s[t] / p.s[T];
    sum += x;
    sum_sq += x * x;
    closed += azcb_price(p.s[t], p.tau[t], p.tau[T]);
  }
  return finish(sum, sum_sq, paths.size(), closed / static_cast<double>(paths.size()));
}

Eigen::VectorXd sample_terminal(double s_t, double tau_t, double tau_T, int n, std::uint64_t seed) {
  if (!(tau_T > tau_t)) throw ConfigError("sample_terminal: need tau_T > tau_t");
  const double dphi = std::exp(tau_t) * std::expm1(tau_T - tau_t);
  Eigen::VectorXd out(n);
  Rng rng = path_rng(seed, 0);
  for (int j = 0; j < n; ++j) out[j] = sample_besq4_transition(s_t, dphi, rng);
  return out;
}

std::vector<OraclePoint> default_oracle_points(double s_t, double tau_t) {
  std::vector<OraclePoint> pts;
  for (const double k : {0.25, 0.5, 1.0, 2.0, 4.0})
    pts.push_back({s_t, tau_t, std::log(std::exp(tau_t) + 0.5 * k * s_t)});
  return pts;
}

std::vector<McPrice> run_oracle(const std::vector<OraclePoint>& points, int n, std::uint64_t seed) {
  std::vector<McPrice> out;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& pt = points[k];
    out.push_back(mc_zcb_price(sample_terminal(pt.s_t, pt.tau_t, pt.tau_T, n, seed + k), pt.s_t,
                               pt.tau_t, pt.tau_T));
  }
  return out;
}

std::vector<ConvergenceRow> hedge_convergence_experiment(const SimConfig& config,
                                                         const std::vector<double>& step_sizes) {
  if (step_sizes.empty()) throw ConfigError("convergence: no step sizes");
  for (std::size_t k = 1; k < step_sizes.size(); ++k)
    if (!(step_sizes[k] < step_sizes[k - 1])) throw ConfigError("convergence: step sizes must decrease");
  SimConfig fine = config;
  fine.step = step_sizes.back();
  validate(fine);

  std::vector<int> strides;
  for (const double h : step_sizes) {
    const double ratio = h / fine.step;
    const long stride = std::lround(ratio);
    if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio)
      throw ConfigError("convergence: step sizes must be multiples of the finest");
    strides.push_back(static_cast<int>(stride));
  }
  const Eigen::Index fine_steps = time_grid(fine).size() - 1;
  for (const int stride : strides)
    if (fine_steps % stride != 0) throw ConfigError("convergence: horizon must be a multiple of every step");

  const double tau_T = config.tau0 + config.slope * config.horizon;
  std::vector<double> sum(step_sizes.size(), 0.0), sum_sq(step_sizes.size(), 0.0);
  for (int j = 0; j < config.n_paths; ++j) {
    const SimPath p = simulate_path(fine, static_cast<std::uint64_t>(j));
    for (std::size_t k = 0; k < strides.size(); ++k) {
      const Eigen::Index m = fine_steps / strides[k] + 1;
      const Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<>>(
          p.s.data(), m, Eigen::InnerStride<>(strides[k]));
      Eigen::VectorXd tau = Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<>>(
          p.tau.data(), m, Eigen::InnerStride<>(strides[k]));
      tau[m - 1] = tau_T;
      const double e = hedge_path(s, tau, tau_T).max_abs_error;
      sum[k] += e;
      sum_sq[k] += e * e;
    }
  }
  std::vector<ConvergenceRow> rows;
  const double n = config.n_paths;
  for (std::size_t k = 0; k < step_sizes.size(); ++k) {
    const double mean = sum[k] / n;
    const double var = n > 1 ? std::max(sum_sq[k] - n * mean * mean, 0.0) / (n - 1.0) : 0.0;
    rows.push_back({step_sizes[k], static_cast<int>(fine_steps / strides[k]), mean, std::sqrt(var / n)});
  }
  return rows;
}

}  // namespace flvr
