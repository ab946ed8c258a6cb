#include "flvr/panel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flvr/student_t.hpp"

namespace flvr {

std::vector<std::size_t> month_starts(const std::vector<Date>& dates) {
  using namespace std::chrono;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dates.size(); ++i) {
    const year_month_day cur{dates[i]};
    if (i == 0) {
      out.push_back(i);
      continue;
    }
    const year_month_day prev{dates[i - 1]};
    if (cur.year() != prev.year() || cur.month() != prev.month()) out.push_back(i);
  }
  return out;
}

PanelSpec build_panel(const DiscountedIndex& data, const TrendLine& line, const PanelConfig& config) {
  if (config.term_min_months < 1 || config.term_max_months < config.term_min_months)
    throw ConfigError("panel: invalid term range");
  PanelSpec spec;
  spec.trendline = line;
  spec.hedge = config.hedge;
  const std::size_t n = data.size();
  const std::size_t earliest = line.fit_window.last;
  for (const std::size_t start : month_starts(data.dates)) {
    // A calendar month's first date can precede the fit window's end date
    // (e.g. the window ends mid-month); such months do not qualify.
    if (start < earliest) continue;
    const Date d = data.dates[start];
    if (config.init_from && d < *config.init_from) continue;
    if (config.init_to && d > *config.init_to) continue;
    for (int m = config.term_min_months; m <= config.term_max_months; ++m) {
      const std::size_t mat = lower_bound_index(data.dates, add_months(d, m));
      if (mat >= n) continue;
      spec.contracts.push_back({spec.contracts.size(), start, mat, m});
    }
  }
  if (spec.contracts.empty()) throw DataError("panel: no contract fits the data window");
  return spec;
}

SampleStats summarize(std::vector<double> values) {
  SampleStats st;
  st.n = values.size();
  if (values.empty()) return st;
  std::sort(values.begin(), values.end());
  // Neumaier summation.
  double sum = 0.0, comp = 0.0;
  for (const double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  st.mean = (sum + comp) / static_cast<double>(st.n);
  if (values.front() == values.back()) st.mean = values.front();
  st.max = values.back();
  if (st.n >= 2) {
    double ss = 0.0, c2 = 0.0;
    for (const double v : values) {
      const double dev = (v - st.mean) * (v - st.mean);
      const double t = ss + dev;
      c2 += ss >= dev ? (ss - t) + dev : (dev - t) + ss;
      ss = t;
    }
    st.stddev = std::sqrt((ss + c2) / static_cast<double>(st.n - 1));
  }
  return st;
}

Histogram histogram(const std::vector<double>& values, int bins) {
  if (bins < 1) throw ConfigError("histogram: bins must be positive");
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  if (values.empty()) {
    h.edges.assign(static_cast<std::size_t>(bins) + 1, 0.0);
    return h;
  }
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn, hi = *mx;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double w = (hi - lo) / bins;
  for (int k = 0; k <= bins; ++k) h.edges.push_back(k == bins ? hi : lo + k * w);
  for (const double v : values) {
    auto k = static_cast<std::size_t>((v - lo) / w);
    if (k >= h.counts.size()) k = h.counts.size() - 1;
    ++h.counts[k];
  }
  return h;
}

PanelResult aggregate(std::vector<ContractOutcome> outcomes) {
  PanelResult r;
  r.outcomes = std::move(outcomes);
  std::vector<double> v, e;
  v.reserve(r.outcomes.size());
  e.reserve(r.outcomes.size());
  for (const auto& o : r.outcomes) {
    v.push_back(o.flvr);
    e.push_back(o.max_abs_error);
  }
  r.flvr = summarize(std::move(v));
  r.max_error = summarize(std::move(e));
  return r;
}

PanelResult run_panel(const PanelSpec& spec, const DiscountedIndex& s, const ActivityTimePath& tau) {
  std::vector<ContractOutcome> outcomes;
  outcomes.reserve(spec.contracts.size());
  for (const auto& c : spec.contracts) {
    try {
      const AZCBContract contract = make_contract(c.start_index, c.maturity_index, spec.trendline, s.size());
      const FlvrOutcome o = flvr_outcome(run_hedge(contract, s, tau, spec.hedge));
      outcomes.push_back({c, s.dates[c.start_index], s.dates[c.maturity_index], o.flvr_at_maturity,
                          o.max_abs_error});
    } catch (const NumericalError& e) {
      throw NumericalError("panel contract " + std::to_string(c.id) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("panel contract " + std::to_string(c.id) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("panel contract " + std::to_string(c.id) + ": " + e.what());
    }
  }
  return aggregate(std::move(outcomes));
}

TestReport t_test(const SampleStats& flvr, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("t_test: alpha must lie in (0, 1)");
  if (flvr.n < 2 || !flvr.stddev) throw NumericalError("t_test: need at least 2 observations");
  if (!(*flvr.stddev > 0.0)) throw NumericalError("t_test: degenerate sample (zero deviation)");
  TestReport rep;
  rep.n = flvr.n;
  rep.mean = flvr.mean;
  rep.stddev = *flvr.stddev;
  rep.alpha = alpha;
  rep.degrees_of_freedom = static_cast<double>(flvr.n - 1);
  const double se = rep.stddev / std::sqrt(static_cast<double>(flvr.n));
  rep.t_statistic = rep.mean / se;
  rep.critical_value = student_t_quantile(1.0 - alpha, rep.degrees_of_freedom);
  rep.threshold = rep.critical_value * se;
  rep.reject = rep.t_statistic >= rep.critical_value || rep.mean >= rep.threshold;
  return rep;
}

TestReport t_test(const PanelResult& result, double alpha) { return t_test(result.flvr, alpha); }

}  // namespace flvr
