#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "flvr/activity_time.hpp"
#include "flvr/errors.hpp"
#include "flvr/series.hpp"

namespace flvr {

/// Zero-coupon bond price in savings-account units when the discounted index
/// is `s`, the activity time is `tau` and the maturity activity time is `tau_T`:
///   P = 1 - exp(-s / (2 max(e^{tau_T} - e^{tau}, 0))).
/// A zero gap means the bond has matured: P = 1.
template <typename Scalar>
Scalar azcb_price(Scalar s, Scalar tau, Scalar tau_T) {
  using std::exp;
  using std::expm1;
  const Scalar gap = std::max(exp(tau_T) - exp(tau), Scalar(0));
  if (gap == Scalar(0)) return Scalar(1);
  return -expm1(-s / (2 * gap));
}

/// Payoff at maturity; the same function as the price.
template <typename Scalar>
Scalar azcb_payoff(Scalar s_T, Scalar tau_T, Scalar tau_bar_T) {
  return azcb_price(s_T, tau_T, tau_bar_T);
}

/// Fraction of a ZCB hedge held in the index when the hedge is worth `z`:
///   pi = (1 - 1/z) ln(1 - z),  0 < z < 1.
/// Equals (dP/dS) S / P evaluated at P = z.
template <typename Scalar>
Scalar hedge_fraction(Scalar z) {
  using std::log1p;
  if (!(z > Scalar(0) && z < Scalar(1)))
    throw NumericalError("hedge_fraction: value must lie in (0, 1)");
  return (Scalar(1) - Scalar(1) / z) * log1p(-z);
}

struct CostModel {
  double proportional_rate = 0.0;  ///< charged per unit of traded index notional
};

/// Which value drives the hedge fraction at each step.
enum class HedgeFractionSource {
  kPortfolio,        ///< the hedge portfolio value Z
  kTheoreticalPrice  ///< the model price P
};

struct HedgeOptions {
  CostModel costs;
  HedgeFractionSource source = HedgeFractionSource::kPortfolio;
};

/// Per-step record of one hedged bond from initiation to maturity.
struct HedgeLedger {
  std::vector<Date> dates;  ///< empty for synthetic paths
  Eigen::VectorXd s;
  Eigen::VectorXd tau;
  Eigen::VectorXd price;     ///< P_i
  Eigen::VectorXd value;     ///< Z_i
  Eigen::VectorXd fraction;  ///< pi_i held over (t_i, t_{i+1}]
  Eigen::VectorXd error;     ///< C_i = P_i - Z_i
  Eigen::VectorXd flvr;      ///< V_i = Z_i - P_start
  Eigen::VectorXd cost;      ///< cost paid at t_i
  double tau_bar_T = 0.0;
  double payoff = 0.0;
  double max_abs_error = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(s.size()); }
};

/// Runs the discrete self-financing hedge along (s, tau) with maturity
/// activity time tau_bar_T fixed in advance. Step 0 is initiation, the last
/// step is maturity. Once Z reaches 1 the portfolio sits in the savings
/// account for good.
HedgeLedger hedge_path(const Eigen::Ref<const Eigen::VectorXd>& s,
                       const Eigen::Ref<const Eigen::VectorXd>& tau, double tau_bar_T,
                       const HedgeOptions& options = {});

struct AZCBContract {
  std::size_t start_index = 0;
  std::size_t maturity_index = 0;
  TrendLine trendline;
};

/// Validates a contract against a grid of `n` dates: start < maturity < n and
/// start not before the end of the trendline's fit window.
AZCBContract make_contract(std::size_t start, std::size_t maturity, const TrendLine& line,
                           std::size_t n);

/// Hedges `contract` on the data. `tau` must be the activity time of the full
/// history from the first date.
HedgeLedger run_hedge(const AZCBContract& contract, const DiscountedIndex& s,
                      const ActivityTimePath& tau, const HedgeOptions& options = {});

struct FlvrOutcome {
  double flvr_at_maturity = 0.0;
  double max_abs_error = 0.0;
};

FlvrOutcome flvr_outcome(const HedgeLedger& ledger);

}  // namespace flvr
