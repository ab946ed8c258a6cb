#include "flvr/azcb.hpp"

#include <string>

namespace flvr {

HedgeLedger hedge_path(const Eigen::Ref<const Eigen::VectorXd>& s,
                       const Eigen::Ref<const Eigen::VectorXd>& tau, double tau_bar_T,
                       const HedgeOptions& options) {
  const Eigen::Index n = s.size();
  if (n < 2 || tau.size() != n) throw DataError("hedge: need matching paths of length >= 2");
  const double rate = options.costs.proportional_rate;
  if (!(rate >= 0.0)) throw ConfigError("hedge: cost rate must be nonnegative");

  HedgeLedger lg;
  lg.s = s;
  lg.tau = tau;
  lg.tau_bar_T = tau_bar_T;
  lg.price.resize(n);
  lg.value.resize(n);
  lg.fraction.resize(n);
  lg.cost.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) lg.price[i] = azcb_price(s[i], tau[i], tau_bar_T);

  const auto target_fraction = [&](Eigen::Index i, double z) {
    if (i == n - 1) return 0.0;
    if (options.source == HedgeFractionSource::kTheoreticalPrice) {
      const double p = lg.price[i];
      return p < 1.0 ? hedge_fraction(p) : 0.0;
    }
    return hedge_fraction(z);
  };
  // Rebalance from `held` notional to the target; returns wealth after costs
  // and records the effective fraction of that wealth in the index.
  const auto rebalance = [&](Eigen::Index i, double z, double target, double held) {
    const double cost = rate * std::abs(target * z - held);
    const double z_after = z - cost;
    if (!(z_after > 0.0))
      throw NumericalError("hedge: portfolio value nonpositive after costs at step " + std::to_string(i));
    lg.cost[i] = cost;
    lg.value[i] = z_after;
    lg.fraction[i] = cost == 0.0 ? target : target * z / z_after;
  };

  const double p0 = lg.price[0];
  bool frozen = !(p0 < 1.0);
  rebalance(0, p0, frozen ? 0.0 : target_fraction(0, p0), 0.0);
  for (Eigen::Index i = 1; i < n; ++i) {
    const double z_prev = lg.value[i - 1];
    if (frozen) {
      lg.value[i] = z_prev;
      lg.fraction[i] = 0.0;
      lg.cost[i] = 0.0;
      continue;
    }
    const double ret = s[i] / s[i - 1];
    const double pi_prev = lg.fraction[i - 1];
    const double z = z_prev * (1.0 + pi_prev * (ret - 1.0));
    const double held = pi_prev * z_prev * ret;
    frozen = !(z < 1.0);
    rebalance(i, z, frozen ? 0.0 : target_fraction(i, z), held);
  }

  lg.error = lg.price - lg.value;
  lg.flvr = lg.value.array() - p0;
  lg.payoff = lg.price[n - 1];
  lg.max_abs_error = lg.error.cwiseAbs().maxCoeff();
  return lg;
}

AZCBContract make_contract(std::size_t start, std::size_t maturity, const TrendLine& line,
                           std::size_t n) {
  if (!(start < maturity)) throw ConfigError("contract: initiation must precede maturity");
  if (maturity >= n) throw ConfigError("contract: maturity beyond the data");
  if (start < line.fit_window.last)
    throw ConfigError("contract: initiation inside the trendline fit window");
  return {start, maturity, line};
}

HedgeLedger run_hedge(const AZCBContract& contract, const DiscountedIndex& s,
                      const ActivityTimePath& tau, const HedgeOptions& options) {
  if (tau.size() != s.size() || (!s.dates.empty() && tau.dates.front() != s.dates.front()))
    throw DataError("run_hedge: activity time must cover the full index history");
  make_contract(contract.start_index, contract.maturity_index, contract.trendline, s.size());
  const auto first = static_cast<Eigen::Index>(contract.start_index);
  const auto len = static_cast<Eigen::Index>(contract.maturity_index - contract.start_index + 1);
  const double tau_bar_T = trendline_value(contract.trendline, s.dates[contract.maturity_index]);
  HedgeLedger lg = hedge_path(s.values.segment(first, len), tau.tau.segment(first, len), tau_bar_T, options);
  lg.dates.assign(s.dates.begin() + first, s.dates.begin() + first + len);
  return lg;
}

FlvrOutcome flvr_outcome(const HedgeLedger& ledger) {
  if (ledger.size() == 0) throw DataError("flvr_outcome: empty ledger");
  return {ledger.flvr[ledger.flvr.size() - 1], ledger.max_abs_error};
}

}  // namespace flvr
