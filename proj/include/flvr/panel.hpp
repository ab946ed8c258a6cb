#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "flvr/activity_time.hpp"
#include "flvr/azcb.hpp"
#include "flvr/series.hpp"

namespace flvr {

struct PanelConfig {
  int term_min_months = 180;
  int term_max_months = 204;
  std::optional<Date> init_from;  ///< earliest initiation; never before the fit window's end
  std::optional<Date> init_to;    ///< latest initiation
  HedgeOptions hedge;
};

struct PanelContract {
  std::size_t id = 0;
  std::size_t start_index = 0;
  std::size_t maturity_index = 0;
  int term_months = 0;
};

struct PanelSpec {
  std::vector<PanelContract> contracts;
  TrendLine trendline;
  HedgeOptions hedge;
};

/// First available date of each calendar month.
std::vector<std::size_t> month_starts(const std::vector<Date>& dates);

/// Enumerates every (month start, term) pair whose maturity, the same day of
/// month `term` months later snapped forward to the next data date, lies in the
/// data. Initiations start no earlier than the trendline's fit window end.
PanelSpec build_panel(const DiscountedIndex& data, const TrendLine& line, const PanelConfig& config);

struct SampleStats {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> stddev;  ///< sample standard deviation; empty for n < 2
  double max = 0.0;
};

/// Order-insensitive: values are sorted, then summed with compensation, and the
/// deviation uses a second pass about the mean.
SampleStats summarize(std::vector<double> values);

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 edges
  std::vector<std::size_t> counts;
};

Histogram histogram(const std::vector<double>& values, int bins = 50);

struct ContractOutcome {
  PanelContract contract;
  Date start{};
  Date maturity{};
  double flvr = 0.0;
  double max_abs_error = 0.0;
};

struct PanelResult {
  std::vector<ContractOutcome> outcomes;
  SampleStats flvr;       ///< m_V, s_V over contracts
  SampleStats max_error;  ///< statistics of per-contract max abs hedge error

  std::size_t n() const { return outcomes.size(); }
};

/// Hedges every contract; a failing contract aborts with its id in the message.
PanelResult run_panel(const PanelSpec& spec, const DiscountedIndex& s, const ActivityTimePath& tau);

/// Aggregates a set of outcomes (used by run_panel and when reloading a panel CSV).
PanelResult aggregate(std::vector<ContractOutcome> outcomes);

struct TestReport {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double t_statistic = 0.0;
  double alpha = 0.0;
  double degrees_of_freedom = 0.0;
  double critical_value = 0.0;  ///< t(1 - alpha, n - 1)
  double threshold = 0.0;       ///< critical_value * stddev / sqrt(n)
  bool reject = false;
};

/// One-sided test of H0: mu = 0 against H1: mu > 0 on the panel's FLVRs.
/// Rejects iff T >= t(1 - alpha, n - 1), equivalently mean >= threshold; a
/// tie between the two forms at the rounding level counts as rejection.
TestReport t_test(const SampleStats& flvr, double alpha);
TestReport t_test(const PanelResult& result, double alpha);

}  // namespace flvr
