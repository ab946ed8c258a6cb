// Command-line front end: ingest, fit, hedge, panel, test, simulate.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "flvr/cli/commands.hpp"
#include "flvr/errors.hpp"

namespace {

using namespace flvr;
using namespace flvr::cli;

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> index, rates, out, panel;
  std::optional<std::string> index_column, rates_column, date_column;
  std::optional<std::string> start, maturity, init_from, init_to, fraction_source;
  std::optional<int> term_min, term_max, paths, bins, oracle_paths;
  std::optional<double> cost_bp, alpha, step, horizon;
  std::optional<std::uint64_t> seed;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--index", f.index, "index level CSV");
  cmd->add_option("--rates", f.rates, "T-bill discount rate CSV (percent)");
  cmd->add_option("--index-column", f.index_column, "value column of the index CSV");
  cmd->add_option("--rates-column", f.rates_column, "value column of the rates CSV");
  cmd->add_option("--date-column", f.date_column, "date column of both CSVs");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--start", f.start, "hedge initiation date (YYYY-MM-DD)");
  cmd->add_option("--maturity", f.maturity, "hedge maturity date (YYYY-MM-DD)");
  cmd->add_option("--fraction-source", f.fraction_source, "portfolio | price");
  cmd->add_option("--term-min-months", f.term_min, "shortest panel term");
  cmd->add_option("--term-max-months", f.term_max, "longest panel term");
  cmd->add_option("--init-from", f.init_from, "earliest panel initiation date");
  cmd->add_option("--init-to", f.init_to, "latest panel initiation date");
  cmd->add_option("--cost-bp", f.cost_bp, "proportional transaction cost in basis points");
  cmd->add_option("--alpha", f.alpha, "significance level of the t-test");
  cmd->add_option("--bins", f.bins, "histogram bins");
  cmd->add_option("--panel", f.panel, "panel CSV to test (test subcommand)");
  cmd->add_option("--seed", f.seed, "simulation seed");
  cmd->add_option("--paths", f.paths, "simulated paths for the convergence experiment");
  cmd->add_option("--oracle-paths", f.oracle_paths, "Monte-Carlo draws per oracle point");
  cmd->add_option("--step", f.step, "finest simulation step in years");
  cmd->add_option("--horizon", f.horizon, "simulation horizon in years");
}

Date flag_date(const std::string& s) {
  try {
    return parse_date(s);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config ? load_config(*f.config) : RunConfig{};
  if (f.index) c.index.path = *f.index;
  if (f.rates) c.rates.path = *f.rates;
  if (f.index_column) c.index.schema.value_column = *f.index_column;
  if (f.rates_column) c.rates.schema.value_column = *f.rates_column;
  if (f.date_column) c.index.schema.date_column = c.rates.schema.date_column = *f.date_column;
  if (f.out) c.out_dir = *f.out;
  if (f.start) c.hedge_start = flag_date(*f.start);
  if (f.maturity) c.hedge_maturity = flag_date(*f.maturity);
  if (f.fraction_source) {
    if (*f.fraction_source == "portfolio")
      c.fraction_source = HedgeFractionSource::kPortfolio;
    else if (*f.fraction_source == "price")
      c.fraction_source = HedgeFractionSource::kTheoreticalPrice;
    else
      throw ConfigError("--fraction-source must be 'portfolio' or 'price'");
  }
  if (f.term_min) c.term_min_months = *f.term_min;
  if (f.term_max) c.term_max_months = *f.term_max;
  if (f.init_from) c.init_from = flag_date(*f.init_from);
  if (f.init_to) c.init_to = flag_date(*f.init_to);
  if (f.cost_bp) c.cost_bp = *f.cost_bp;
  if (f.alpha) c.alpha = *f.alpha;
  if (f.bins) c.histogram_bins = *f.bins;
  if (f.panel) c.panel_csv = *f.panel;
  if (f.seed) c.sim.config.seed = *f.seed;
  if (f.paths) c.sim.config.n_paths = *f.paths;
  if (f.oracle_paths) c.sim.oracle_paths = *f.oracle_paths;
  if (f.step) c.sim.config.step = *f.step;
  if (f.horizon) c.sim.config.horizon = *f.horizon;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark-approach zero-coupon bond hedging backtests and simulation"};
  app.require_subcommand(1);
  Flags flags;
  struct Sub {
    const char* name;
    const char* help;
    CommandResult (*run)(const RunConfig&);
  };
  const Sub subs[] = {
      {"ingest", "build the savings account and the discounted index", cmd_ingest},
      {"fit", "estimate the initial activity time and its trendline", cmd_fit},
      {"hedge", "price and hedge one bond, write its ledger", cmd_hedge},
      {"panel", "run the panel of extreme-maturity bonds and the t-test", cmd_panel},
      {"test", "t-test on a panel CSV (or a freshly computed panel)", cmd_test},
      {"simulate", "Monte-Carlo price oracle and hedge convergence on model paths", cmd_simulate},
  };
  for (const auto& s : subs) add_flags(app.add_subcommand(s.name, s.help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    const RunConfig config = resolve(flags);
    for (const auto& s : subs) {
      if (!app.got_subcommand(s.name)) continue;
      const CommandResult r = s.run(config);
      std::cout << r.summary.dump(2) << '\n';
      if (!r.text.empty()) std::cout << r.text;
      for (const auto& p : r.outputs) std::cout << "wrote " << p.string() << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  return kOk;
}
