#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "flvr/series.hpp"

namespace flvr {

/// Discretely observed activity time
///   tau_i = ln( sum_{l<=i} (sqrt(S_l) - sqrt(S_{l-1}))^2 + exp(tau0) ).
/// tau_0 is returned as `tau0` exactly.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> activity_time(
    const Eigen::MatrixBase<Derived>& s, typename Derived::Scalar tau0) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  using std::log;
  using std::sqrt;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tau(s.size());
  if (s.size() == 0) return tau;
  tau[0] = tau0;
  Scalar qv = exp(tau0);
  Scalar prev = sqrt(s[0]);
  for (Eigen::Index i = 1; i < s.size(); ++i) {
    const Scalar cur = sqrt(s[i]);
    qv += (cur - prev) * (cur - prev);
    prev = cur;
    tau[i] = log(qv);
  }
  return tau;
}

/// Cumulative squared increments of sqrt(S); element 0 is 0.
Eigen::VectorXd sqrt_quadratic_variation(const Eigen::VectorXd& s);

struct ActivityTimePath {
  std::vector<Date> dates;
  Eigen::VectorXd tau;

  std::size_t size() const { return dates.size(); }
};

ActivityTimePath activity_time(const DiscountedIndex& s, double tau0);

/// Inclusive index range [first, last].
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t length() const { return last - first + 1; }
};

/// Indices 0..N/2 where N is the largest even index of a series of length n.
IndexRange first_half_window(std::size_t n);

/// tau_bar(t) = intercept + slope * t, t in years since time_origin.
struct TrendLine {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 1.0;
  IndexRange fit_window;
  Date time_origin{};
};

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 1.0;
};

/// Ordinary least squares of y on x. R^2 is 1 when y has no variation.
/// Throws DataError if all x are equal.
LineFit fit_line(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Years since dates[0] for each date.
Eigen::VectorXd year_axis(const std::vector<Date>& dates);

/// OLS of tau on calendar time (years since the path's first date) over `window`.
TrendLine fit_trendline(const ActivityTimePath& path, IndexRange window);

double trendline_value(const TrendLine& line, double years_since_origin);
double trendline_value(const TrendLine& line, Date when);

struct TauSearch {
  std::optional<double> lo;  ///< defaults to ln(q) - 8, q the window's quadratic variation
  std::optional<double> hi;  ///< defaults to ln(q) + 2
  int grid_points = 201;
  double tolerance = 1e-8;
};

struct InitialTauEstimate {
  double tau0 = 0.0;
  TrendLine line;
  double lo = 0.0;
  double hi = 0.0;
  bool at_bracket_edge = false;  ///< maximizer sits on a bracket endpoint
};

/// R^2 of the trendline fitted over `window` when the activity time starts at tau0.
double trendline_r_squared(const DiscountedIndex& s, IndexRange window, double tau0);

/// Chooses tau0 maximizing the trendline R^2 over `window`: grid search over the
/// bracket, then golden-section refinement around the best grid point.
InitialTauEstimate estimate_initial_tau(const DiscountedIndex& s, IndexRange window,
                                        const TauSearch& search = {});

}  // namespace flvr
