#include "flvr/cli/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include "flvr/errors.hpp"
#include "flvr/mmm_sim.hpp"
#include "flvr/student_t.hpp"

namespace flvr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return fnv1a_hex(std::string(std::istreambuf_iterator<char>(in), {}));
}

namespace {

void require_input(const InputSpec& spec, const char* what) {
  if (spec.path.empty()) throw ConfigError(std::string("no ") + what + " file given");
  if (!fs::exists(spec.path)) throw ConfigError(std::string(what) + " file not found: " + spec.path.string());
}

fs::path prepare_out(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec || !fs::is_directory(config.out_dir))
    throw ConfigError("cannot create output directory " + config.out_dir.string());
  return config.out_dir;
}

template <typename Writer>
fs::path write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  writer(out);
  if (!out) throw ConfigError("write failed: " + path.string());
  return path;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes <name>_summary.json and manifest_<name>.json.
CommandResult finish(const RunConfig& config, const std::string& name, CommandResult result,
                     const std::string& started, const std::vector<fs::path>& inputs) {
  const fs::path dir = config.out_dir;
  result.outputs.push_back(write_file(dir / (name + "_summary.json"),
                                      [&](std::ostream& os) { os << result.summary.dump(2) << '\n'; }));
  json manifest;
  manifest["command"] = name;
  manifest["version"] = kVersion;
  manifest["config_hash"] = fnv1a_hex(to_json(config).dump());
  manifest["started_at"] = started;
  manifest["finished_at"] = utc_now();
  json in = json::object();
  for (const auto& p : inputs) in[p.string()] = file_checksum(p);
  manifest["inputs"] = in;
  json out = json::object();
  for (const auto& p : result.outputs) out[p.filename().string()] = file_checksum(p);
  manifest["outputs"] = out;
  write_file(dir / ("manifest_" + name + ".json"), [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
  return result;
}

std::vector<fs::path> market_inputs(const RunConfig& c) { return {c.index.path, c.rates.path}; }

json trendline_json(const FitResult& fit, const std::vector<Date>& dates) {
  const auto& e = fit.estimate;
  return json{{"tau0", e.tau0},
              {"intercept", e.line.intercept},
              {"slope_per_year", e.line.slope},
              {"r_squared", e.line.r_squared},
              {"window_start", format_date(dates[fit.window.first])},
              {"window_end", format_date(dates[fit.window.last])},
              {"window_points", fit.window.length()},
              {"bracket", {e.lo, e.hi}},
              {"at_bracket_edge", e.at_bracket_edge}};
}

json report_json(const TestReport& r) {
  return json{{"n", r.n},
              {"mean", r.mean},
              {"stddev", r.stddev},
              {"t_statistic", r.t_statistic},
              {"alpha", r.alpha},
              {"degrees_of_freedom", r.degrees_of_freedom},
              {"critical_value", r.critical_value},
              {"threshold", r.threshold},
              {"reject_h0", r.reject}};
}

json panel_json(const PanelResult& r) {
  json j{{"n", r.n()},
         {"mean_flvr", r.flvr.mean},
         {"max_max_abs_error", r.max_error.max},
         {"mean_max_abs_error", r.max_error.mean},
         {"reference_count", 8475},
         {"count_matches_reference", r.n() == 8475}};
  j["std_flvr"] = r.flvr.stddev ? json(*r.flvr.stddev) : json(nullptr);
  j["std_max_abs_error"] = r.max_error.stddev ? json(*r.max_error.stddev) : json(nullptr);
  return j;
}

std::vector<fs::path> write_panel_outputs(const RunConfig& config, const PanelResult& result) {
  const fs::path dir = config.out_dir;
  std::vector<double> v, e;
  for (const auto& o : result.outcomes) {
    v.push_back(o.flvr);
    e.push_back(o.max_abs_error);
  }
  return {
      write_file(dir / "panel.csv", [&](std::ostream& os) { write_panel_csv(os, result); }),
      write_file(dir / "histogram_flvr.csv",
                 [&](std::ostream& os) { write_histogram_csv(os, histogram(v, config.histogram_bins)); }),
      write_file(dir / "histogram_max_abs_error.csv",
                 [&](std::ostream& os) { write_histogram_csv(os, histogram(e, config.histogram_bins)); }),
  };
}

}  // namespace

MarketData load_market(const RunConfig& config) {
  require_input(config.index, "index");
  require_input(config.rates, "rates");
  MarketData m;
  CsvSchema index_schema = config.index.schema;
  index_schema.kind = ValueKind::kLevel;
  CsvSchema rates_schema = config.rates.schema;
  rates_schema.kind = ValueKind::kRate;
  m.index = load_series(config.index.path, index_schema);
  m.rates = load_series(config.rates.path, rates_schema);
  m.aligned = align_rates(m.rates, m.index.dates);
  if (m.aligned.rates.size() < 2) throw DataError("rates do not cover the index dates");
  m.account = build_savings_account(m.aligned.rates, config.max_rate);
  m.discounted = discount_index(m.index, m.account, &m.join);
  return m;
}

FitResult fit_market(const DiscountedIndex& s, const RunConfig& config) {
  FitResult fit;
  fit.window = first_half_window(s.size());
  fit.estimate = estimate_initial_tau(s, fit.window, config.tau_search);
  fit.tau = activity_time(s, fit.estimate.tau0);
  return fit;
}

AZCBContract configured_contract(const DiscountedIndex& s, const FitResult& fit, const RunConfig& config) {
  const std::size_t n = s.size();
  const std::size_t start = config.hedge_start ? lower_bound_index(s.dates, *config.hedge_start) : fit.window.last;
  const std::size_t maturity = config.hedge_maturity ? lower_bound_index(s.dates, *config.hedge_maturity) : n - 1;
  if (start >= n) throw ConfigError("hedge start after the last data date");
  if (maturity >= n) throw ConfigError("hedge maturity after the last data date");
  return make_contract(start, maturity, fit.estimate.line, n);
}

void write_tau_csv(std::ostream& out, const ActivityTimePath& tau, const TrendLine& line) {
  out << "date,tau,tau_trend\n";
  for (std::size_t i = 0; i < tau.size(); ++i)
    out << format_date(tau.dates[i]) << ',' << format_number(tau.tau[static_cast<Eigen::Index>(i)]) << ','
        << format_number(trendline_value(line, tau.dates[i])) << '\n';
}

void write_ledger_csv(std::ostream& out, const HedgeLedger& lg) {
  out << "date,S,tau,P,Z,pi,C,V\n";
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(lg.size()); ++i) {
    out << (lg.dates.empty() ? std::to_string(i) : format_date(lg.dates[static_cast<std::size_t>(i)]));
    for (const double v : {lg.s[i], lg.tau[i], lg.price[i], lg.value[i], lg.fraction[i], lg.error[i], lg.flvr[i]})
      out << ',' << format_number(v);
    out << '\n';
  }
}

void write_panel_csv(std::ostream& out, const PanelResult& result) {
  out << "contract_id,start,maturity,V,max_abs_error\n";
  for (const auto& o : result.outcomes)
    out << o.contract.id << ',' << format_date(o.start) << ',' << format_date(o.maturity) << ','
        << format_number(o.flvr) << ',' << format_number(o.max_abs_error) << '\n';
}

std::vector<ContractOutcome> read_panel_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("contract_id,start,maturity,V,max_abs_error", 0) != 0)
    throw DataError(path.string() + ": not a panel CSV");
  std::vector<ContractOutcome> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string id, start, maturity, v, e;
    if (!std::getline(row, id, ',') || !std::getline(row, start, ',') || !std::getline(row, maturity, ',') ||
        !std::getline(row, v, ',') || !std::getline(row, e))
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    ContractOutcome o;
    try {
      o.contract.id = std::stoul(id);
      o.flvr = std::stod(v);
      o.max_abs_error = std::stod(e);
    } catch (const std::exception&) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": unparsable number");
    }
    o.start = parse_date(start);
    o.maturity = parse_date(maturity);
    out.push_back(o);
  }
  if (out.empty()) throw DataError(path.string() + ": no contracts");
  return out;
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k)
    out << format_number(h.edges[k]) << ',' << format_number(h.edges[k + 1]) << ',' << h.counts[k] << '\n';
}

void write_test_report_csv(std::ostream& out, const TestReport& r) {
  out << "n,mean,stddev,t_statistic,alpha,degrees_of_freedom,critical_value,threshold,reject_h0\n"
      << r.n << ',' << format_number(r.mean) << ',' << format_number(r.stddev) << ','
      << format_number(r.t_statistic) << ',' << format_number(r.alpha) << ','
      << format_number(r.degrees_of_freedom) << ',' << format_number(r.critical_value) << ','
      << format_number(r.threshold) << ',' << (r.reject ? 1 : 0) << '\n';
}

std::string format_test_report(const TestReport& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "H0: mu = 0 vs H1: mu > 0\n"
     << "  n                 " << r.n << '\n'
     << "  mean V            " << r.mean << '\n'
     << "  std V             " << r.stddev << '\n'
     << "  T                 " << r.t_statistic << '\n'
     << "  alpha             " << r.alpha << '\n'
     << "  t(1-alpha, n-1)   " << r.critical_value << '\n'
     << "  threshold on mean " << r.threshold << '\n'
     << "  decision          " << (r.reject ? "reject H0" : "do not reject H0") << '\n';
  return os.str();
}

CommandResult cmd_ingest(const RunConfig& config) {
  const std::string started = utc_now();
  const MarketData m = load_market(config);
  const fs::path dir = prepare_out(config);
  CommandResult r;
  r.outputs.push_back(write_file(dir / "rates.csv", [&](std::ostream& os) { write_series_csv(os, m.aligned.rates); }));
  r.outputs.push_back(
      write_file(dir / "savings_account.csv", [&](std::ostream& os) { write_series_csv(os, m.account); }));
  r.outputs.push_back(
      write_file(dir / "discounted_index.csv", [&](std::ostream& os) { write_series_csv(os, m.discounted); }));
  r.summary = json{{"index_rows", m.index.size()},
                   {"index_skipped_rows", m.index.skipped_rows},
                   {"rate_rows", m.rates.size()},
                   {"rate_skipped_rows", m.rates.skipped_rows},
                   {"rates_carried_forward", m.aligned.carried},
                   {"index_dates_before_first_rate", m.aligned.dropped},
                   {"dropped_index_dates", m.join.dropped_index},
                   {"dropped_account_dates", m.join.dropped_account},
                   {"discounted_rows", m.discounted.size()},
                   {"first_date", format_date(m.discounted.dates.front())},
                   {"last_date", format_date(m.discounted.dates.back())},
                   {"final_savings_account", m.account.values[m.account.values.size() - 1]}};
  return finish(config, "ingest", std::move(r), started, market_inputs(config));
}

CommandResult cmd_fit(const RunConfig& config) {
  const std::string started = utc_now();
  const MarketData m = load_market(config);
  const FitResult fit = fit_market(m.discounted, config);
  const fs::path dir = prepare_out(config);
  CommandResult r;
  r.outputs.push_back(
      write_file(dir / "tau.csv", [&](std::ostream& os) { write_tau_csv(os, fit.tau, fit.estimate.line); }));
  r.summary = trendline_json(fit, m.discounted.dates);
  return finish(config, "fit", std::move(r), started, market_inputs(config));
}

CommandResult cmd_hedge(const RunConfig& config) {
  const std::string started = utc_now();
  const MarketData m = load_market(config);
  const FitResult fit = fit_market(m.discounted, config);
  const AZCBContract contract = configured_contract(m.discounted, fit, config);
  const HedgeLedger lg = run_hedge(contract, m.discounted, fit.tau, config.hedge_options());
  const FlvrOutcome o = flvr_outcome(lg);
  const fs::path dir = prepare_out(config);
  CommandResult r;
  r.outputs.push_back(write_file(dir / "ledger.csv", [&](std::ostream& os) { write_ledger_csv(os, lg); }));
  r.summary = json{{"start", format_date(lg.dates.front())},
                   {"maturity", format_date(lg.dates.back())},
                   {"steps", lg.size()},
                   {"cost_bp", config.cost_bp},
                   {"initial_price", lg.price[0]},
                   {"tau_bar_maturity", lg.tau_bar_T},
                   {"payoff", lg.payoff},
                   {"final_value", lg.value[lg.value.size() - 1]},
                   {"flvr_at_maturity", o.flvr_at_maturity},
                   {"max_abs_error", o.max_abs_error},
                   {"total_cost", lg.cost.sum()},
                   {"trendline", trendline_json(fit, m.discounted.dates)}};
  return finish(config, "hedge", std::move(r), started, market_inputs(config));
}

namespace {

PanelResult compute_panel(const RunConfig& config, const MarketData& m, const FitResult& fit) {
  PanelConfig pc;
  pc.term_min_months = config.term_min_months;
  pc.term_max_months = config.term_max_months;
  pc.init_from = config.init_from;
  pc.init_to = config.init_to;
  pc.hedge = config.hedge_options();
  return run_panel(build_panel(m.discounted, fit.estimate.line, pc), m.discounted, fit.tau);
}

}  // namespace

CommandResult cmd_panel(const RunConfig& config) {
  const std::string started = utc_now();
  const MarketData m = load_market(config);
  const FitResult fit = fit_market(m.discounted, config);
  const PanelResult result = compute_panel(config, m, fit);
  const fs::path dir = prepare_out(config);
  CommandResult r;
  r.outputs = write_panel_outputs(config, result);
  r.summary = panel_json(result);
  r.summary["cost_bp"] = config.cost_bp;
  r.summary["trendline"] = trendline_json(fit, m.discounted.dates);
  if (result.n() >= 2 && result.flvr.stddev && *result.flvr.stddev > 0.0) {
    const TestReport rep = t_test(result, config.alpha);
    r.outputs.push_back(write_file(dir / "test_report.csv", [&](std::ostream& os) { write_test_report_csv(os, rep); }));
    r.summary["test"] = report_json(rep);
    r.text = format_test_report(rep);
  } else {
    r.summary["test"] = nullptr;  // undefined sample deviation
  }
  return finish(config, "panel", std::move(r), started, market_inputs(config));
}

CommandResult cmd_test(const RunConfig& config) {
  const std::string started = utc_now();
  PanelResult result;
  std::vector<fs::path> inputs;
  if (config.panel_csv) {
    if (!fs::exists(*config.panel_csv)) throw ConfigError("panel file not found: " + config.panel_csv->string());
    result = aggregate(read_panel_csv(*config.panel_csv));
    inputs.push_back(*config.panel_csv);
  } else {
    const MarketData m = load_market(config);
    result = compute_panel(config, m, fit_market(m.discounted, config));
    inputs = market_inputs(config);
  }
  const TestReport rep = t_test(result, config.alpha);
  const fs::path dir = prepare_out(config);
  CommandResult r;
  r.outputs.push_back(write_file(dir / "test_report.csv", [&](std::ostream& os) { write_test_report_csv(os, rep); }));
  r.summary = report_json(rep);
  r.text = format_test_report(rep);
  return finish(config, "test", std::move(r), started, inputs);
}

CommandResult cmd_simulate(const RunConfig& config) {
  const std::string started = utc_now();
  const SimSettings& sim = config.sim;
  validate(sim.config);
  if (sim.oracle_paths < 2) throw ConfigError("simulate: oracle_paths must be at least 2");
  const fs::path dir = prepare_out(config);
  CommandResult r;

  const int written = std::min(sim.paths_written, sim.config.n_paths);
  r.outputs.push_back(write_file(dir / "paths.csv", [&](std::ostream& os) {
    os << "path,t,S,tau,phi\n";
    for (int j = 0; j < written; ++j) {
      const SimPath p = simulate_path(sim.config, static_cast<std::uint64_t>(j));
      for (Eigen::Index i = 0; i < p.s.size(); ++i)
        os << j << ',' << format_number(p.times[i]) << ',' << format_number(p.s[i]) << ','
           << format_number(p.tau[i]) << ',' << format_number(p.phi[i]) << '\n';
    }
  }));

  const auto points = default_oracle_points(sim.config.s0, sim.config.tau0);
  const auto prices = run_oracle(points, sim.oracle_paths, sim.config.seed);
  json oracle = json::array();
  double max_abs_z = 0.0;
  r.outputs.push_back(write_file(dir / "oracle.csv", [&](std::ostream& os) {
    os << "point,s_t,tau_t,tau_T,closed_form,mc_estimate,std_error,z_score\n";
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto& pt = points[k];
      const auto& pr = prices[k];
      os << k << ',' << format_number(pt.s_t) << ',' << format_number(pt.tau_t) << ',' << format_number(pt.tau_T)
         << ',' << format_number(pr.closed_form) << ',' << format_number(pr.estimate) << ','
         << format_number(pr.std_error) << ',' << format_number(pr.z_score) << '\n';
      oracle.push_back({{"closed_form", pr.closed_form},
                        {"mc_estimate", pr.estimate},
                        {"std_error", pr.std_error},
                        {"z_score", pr.z_score}});
      max_abs_z = std::max(max_abs_z, std::abs(pr.z_score));
    }
  }));

  std::vector<double> steps = sim.convergence_steps;
  if (steps.empty()) steps = {8 * sim.config.step, 4 * sim.config.step, 2 * sim.config.step, sim.config.step};
  const auto rows = hedge_convergence_experiment(sim.config, steps);
  json conv = json::array();
  r.outputs.push_back(write_file(dir / "convergence.csv", [&](std::ostream& os) {
    os << "step,rebalances,mean_max_abs_error,std_error\n";
    for (const auto& row : rows) {
      os << format_number(row.step) << ',' << row.rebalances << ',' << format_number(row.mean_max_error) << ','
         << format_number(row.std_error) << '\n';
      conv.push_back({{"step", row.step}, {"mean_max_abs_error", row.mean_max_error}, {"std_error", row.std_error}});
    }
  }));
  int decreasing = 0;
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k].mean_max_error < rows[k - 1].mean_max_error) ++decreasing;

  r.summary = json{{"oracle", oracle},
                   {"oracle_max_abs_z", max_abs_z},
                   {"convergence", conv},
                   {"convergence_decreasing_pairs", decreasing},
                   {"convergence_pairs", rows.size() - 1}};
  return finish(config, "simulate", std::move(r), started, {});
}

}  // namespace flvr::cli
