#include "flvr/activity_time.hpp"

#include <algorithm>
#include <cmath>

#include "flvr/errors.hpp"

namespace flvr {

Eigen::VectorXd sqrt_quadratic_variation(const Eigen::VectorXd& s) {
  Eigen::VectorXd qv(s.size());
  if (s.size() == 0) return qv;
  qv[0] = 0.0;
  for (Eigen::Index i = 1; i < s.size(); ++i) {
    const double inc = std::sqrt(s[i]) - std::sqrt(s[i - 1]);
    qv[i] = qv[i - 1] + inc * inc;
  }
  return qv;
}

ActivityTimePath activity_time(const DiscountedIndex& s, double tau0) {
  if (!std::isfinite(tau0)) throw DataError("activity_time: non-finite initial activity time");
  if ((s.values.array() <= 0.0).any()) throw DataError("activity_time: index must be positive");
  return {s.dates, activity_time(s.values, tau0)};
}

IndexRange first_half_window(std::size_t n) {
  if (n < 3) throw DataError("first_half_window: need at least 3 observations");
  const std::size_t last_even = (n - 1) - ((n - 1) % 2);
  return {0, last_even / 2};
}

Eigen::VectorXd year_axis(const std::vector<Date>& dates) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(dates.size()));
  for (std::size_t i = 0; i < dates.size(); ++i)
    t[static_cast<Eigen::Index>(i)] = years_between(dates.front(), dates[i]);
  return t;
}

LineFit fit_line(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double xbar = x.mean();
  const double ybar = y.mean();
  const Eigen::ArrayXd dx = x.array() - xbar;
  const Eigen::ArrayXd dy = y.array() - ybar;
  const double sxx = dx.square().sum();
  if (!(sxx > 0.0)) throw DataError("fit_line: degenerate time axis");
  LineFit fit;
  fit.slope = (dx * dy).sum() / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  const double ss_tot = dy.square().sum();
  if (ss_tot == 0.0) {
    fit.r_squared = 1.0;
  } else {
    const double ss_res = (dy - fit.slope * dx).square().sum();
    fit.r_squared = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  }
  return fit;
}

namespace {

void check_window(IndexRange w, std::size_t n) {
  if (w.last < w.first || w.last >= n) throw DataError("trendline: window outside the series");
  if (w.length() < 3) throw DataError("trendline: window needs at least 3 points");
}

}  // namespace

TrendLine fit_trendline(const ActivityTimePath& path, IndexRange window) {
  check_window(window, path.size());
  const Eigen::VectorXd t = year_axis(path.dates);
  const auto n = static_cast<Eigen::Index>(window.length());
  const auto first = static_cast<Eigen::Index>(window.first);
  const LineFit fit = fit_line(t.segment(first, n), path.tau.segment(first, n));
  return {fit.intercept, fit.slope, fit.r_squared, window, path.dates.front()};
}

double trendline_value(const TrendLine& line, double years_since_origin) {
  return line.intercept + line.slope * years_since_origin;
}

double trendline_value(const TrendLine& line, Date when) {
  return trendline_value(line, years_between(line.time_origin, when));
}

namespace {

// R^2 as a function of tau0 with the window's time axis and quadratic
// variation precomputed.
class TauObjective {
 public:
  TauObjective(const DiscountedIndex& s, IndexRange window) {
    check_window(window, s.size());
    const auto n = static_cast<Eigen::Index>(window.length());
    const auto first = static_cast<Eigen::Index>(window.first);
    first_ = first;
    t_ = year_axis(s.dates).segment(first, n);
    s_ = s.values.head(static_cast<Eigen::Index>(window.last) + 1);
    qv_ = sqrt_quadratic_variation(s_).segment(first, n);
    if (!((t_.array() - t_.mean()).square().sum() > 0.0))
      throw DataError("trendline: degenerate time axis");
  }

  // Same arithmetic as activity_time(), so the value matches fit_trendline exactly.
  double operator()(double tau0) const {
    const Eigen::VectorXd tau = activity_time(s_, tau0);
    return fit_line(t_, tau.segment(first_, t_.size())).r_squared;
  }

  double window_qv() const { return qv_[qv_.size() - 1] - qv_[0]; }

 private:
  Eigen::Index first_ = 0;
  Eigen::VectorXd t_;
  Eigen::VectorXd s_;
  Eigen::VectorXd qv_;
};

}  // namespace

double trendline_r_squared(const DiscountedIndex& s, IndexRange window, double tau0) {
  return TauObjective(s, window)(tau0);
}

InitialTauEstimate estimate_initial_tau(const DiscountedIndex& s, IndexRange window,
                                        const TauSearch& search) {
  if ((s.values.array() <= 0.0).any()) throw DataError("estimate_initial_tau: index must be positive");
  const TauObjective r2(s, window);
  if (search.tolerance <= 0.0) throw ConfigError("estimate_initial_tau: tolerance must be positive");
  if (search.grid_points < 2) throw ConfigError("estimate_initial_tau: need at least 2 grid points");

  double lo = 0.0, hi = 0.0;
  if (!search.lo || !search.hi) {
    const double q = r2.window_qv();
    if (!(q > 0.0)) throw DataError("estimate_initial_tau: index is constant over the window");
    lo = std::log(q) - 8.0;
    hi = std::log(q) + 2.0;
  }
  if (search.lo) lo = *search.lo;
  if (search.hi) hi = *search.hi;
  if (!(lo <= hi)) throw ConfigError("estimate_initial_tau: bracket lo must not exceed hi");

  InitialTauEstimate est;
  est.lo = lo;
  est.hi = hi;
  const auto finish = [&](double tau0, bool edge) {
    est.tau0 = tau0;
    est.at_bracket_edge = edge;
    est.line = fit_trendline(activity_time(s, tau0), window);
    return est;
  };
  if (hi - lo <= search.tolerance) return finish(lo, false);

  // Coarse grid; strict '>' keeps the smallest tau0 on ties.
  const int m = search.grid_points;
  const double h = (hi - lo) / (m - 1);
  int best = 0;
  double best_val = r2(lo);
  for (int k = 1; k < m; ++k) {
    const double v = r2(lo + k * h);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }

  // Golden-section refinement on the neighbouring grid cells.
  double a = lo + std::max(best - 1, 0) * h;
  double b = lo + std::min(best + 1, m - 1) * h;
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = r2(c), fd = r2(d);
  while (b - a > search.tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = r2(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = r2(d);
    }
  }
  double tau0 = 0.5 * (a + b);
  double val = r2(tau0);
  // Keep the grid point if refinement did not improve on it.
  const double grid_tau = lo + best * h;
  if (best_val > val) {
    tau0 = grid_tau;
    val = best_val;
  }
  const bool edge = (best == 0 || best == m - 1) &&
                    (std::abs(tau0 - lo) <= search.tolerance || std::abs(tau0 - hi) <= search.tolerance);
  return finish(tau0, edge);
}

}  // namespace flvr
