#include "flvr/cli/commands.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "flvr/errors.hpp"
#include "test_util.hpp"

namespace flvr::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::read_text;
using testing::temp_dir;
using testing::write_text;

std::string series_csv(const std::vector<Date>& dates, const std::vector<double>& values) {
  std::ostringstream os;
  os << "date,value\n";
  for (std::size_t i = 0; i < dates.size(); ++i) os << format_date(dates[i]) << ',' << format_number(values[i]) << '\n';
  return os.str();
}

struct Fixture {
  fs::path dir;
  RunConfig config;
};

Fixture make_fixture(const std::string& name, const std::vector<double>& index, double rate) {
  Fixture f;
  f.dir = temp_dir(name);
  const auto dates = testing::daily_dates("2000-01-03", index.size());
  write_text(f.dir / "index.csv", series_csv(dates, index));
  write_text(f.dir / "rates.csv", series_csv(dates, std::vector<double>(index.size(), rate)));
  f.config.index.path = f.dir / "index.csv";
  f.config.rates.path = f.dir / "rates.csv";
  f.config.out_dir = f.dir / "out";
  return f;
}

std::vector<std::string> lines(const fs::path& p) {
  std::istringstream in(read_text(p));
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

TEST(Ingest, ToyFixture) {
  auto f = make_fixture("ingest_toy", {100, 101, 99, 102, 103}, 0.0);
  const auto r = cmd_ingest(f.config);
  for (const auto* name : {"rates.csv", "savings_account.csv", "discounted_index.csv"})
    EXPECT_EQ(lines(f.config.out_dir / name).size(), 6u) << name;
  // With zero rates the account stays at 1 and S equals the index.
  const auto account = load_series(f.config.out_dir / "savings_account.csv", {"date", "value", ',', ValueKind::kLevel});
  for (Eigen::Index i = 0; i < account.values.size(); ++i) EXPECT_EQ(account.values[i], 1.0);
  const auto s = load_series(f.config.out_dir / "discounted_index.csv", {"date", "value", ',', ValueKind::kLevel});
  EXPECT_EQ(s.values[3], 102.0);
  EXPECT_EQ(r.summary["discounted_rows"], 5);
  EXPECT_TRUE(fs::exists(f.config.out_dir / "ingest_summary.json"));
  EXPECT_TRUE(fs::exists(f.config.out_dir / "manifest_ingest.json"));
}

TEST(Ingest, OutputChecksumsAreReproducible) {
  auto f = make_fixture("ingest_repro", testing::random_walk(400, 100, 0.01, 3), 4.5);
  cmd_ingest(f.config);
  const auto first = json::parse(read_text(f.config.out_dir / "manifest_ingest.json"));
  cmd_ingest(f.config);
  const auto second = json::parse(read_text(f.config.out_dir / "manifest_ingest.json"));
  EXPECT_EQ(first["outputs"], second["outputs"]);
  EXPECT_EQ(first["inputs"], second["inputs"]);
  EXPECT_EQ(first["config_hash"], second["config_hash"]);
  EXPECT_EQ(first["version"], kVersion);
}

TEST(Ingest, MissingInputIsConfigError) {
  RunConfig c;
  c.index.path = "/nonexistent/index.csv";
  c.rates.path = "/nonexistent/rates.csv";
  EXPECT_THROW(cmd_ingest(c), ConfigError);
}

TEST(Fit, ExactlyLinearActivityTime) {
  // Build sqrt(S) increments so that tau is exactly linear in years for tau0.
  const double tau0 = -1.0, a = 0.08;
  const std::size_t n = 1500;
  const auto dates = testing::daily_dates("2000-01-03", n);
  std::vector<double> s{4.0};
  double root = 2.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double t0 = years_between(dates[0], dates[i - 1]), t1 = years_between(dates[0], dates[i]);
    const double dq = std::exp(tau0) * (std::exp(a * t1) - std::exp(a * t0));
    root += (i % 2 ? 1.0 : -1.0) * std::sqrt(dq);
    s.push_back(root * root);
  }
  Fixture f;
  f.dir = temp_dir("fit_linear");
  write_text(f.dir / "index.csv", series_csv(dates, s));
  write_text(f.dir / "rates.csv", series_csv(dates, std::vector<double>(n, 0.0)));
  f.config.index.path = f.dir / "index.csv";
  f.config.rates.path = f.dir / "rates.csv";
  f.config.out_dir = f.dir / "out";
  const auto r = cmd_fit(f.config);
  EXPECT_NEAR(r.summary["r_squared"].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(r.summary["slope_per_year"].get<double>(), a, 1e-6);
  EXPECT_NEAR(r.summary["tau0"].get<double>(), tau0, 1e-4);
  EXPECT_EQ(lines(f.config.out_dir / "tau.csv").size(), n + 1);
  EXPECT_EQ(lines(f.config.out_dir / "tau.csv")[0], "date,tau,tau_trend");
}

TEST(Hedge, ConstantIndexLedgerHasNoErrorAndNoValue) {
  // A constant index leaves tau0 unidentified, so the fit refuses it ...
  auto f = make_fixture("hedge_constant", std::vector<double>(300, 50.0), 0.0);
  EXPECT_THROW(cmd_hedge(f.config), DataError);
  // ... but a hedge on it against a fixed trend never moves.
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(300, 50.0);
  const Eigen::VectorXd tau = Eigen::VectorXd::Constant(300, 2.0);
  std::ostringstream os;
  write_ledger_csv(os, hedge_path(s, tau, 4.0));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "date,S,tau,P,Z,pi,C,V");
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::istringstream row(line);
    for (std::string c; std::getline(row, c, ',');) cols.push_back(c);
    ASSERT_EQ(cols.size(), 8u);
    EXPECT_EQ(std::stod(cols[6]), 0.0) << line;
    EXPECT_EQ(std::stod(cols[7]), 0.0) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 300);
}

TEST(Hedge, CostsReduceTheFlvr) {
  auto f = make_fixture("hedge_costs", testing::random_walk(3000, 100, 0.012, 11), 3.0);
  const auto free = cmd_hedge(f.config);
  f.config.cost_bp = 50;
  const auto costly = cmd_hedge(f.config);
  EXPECT_LT(costly.summary["flvr_at_maturity"].get<double>(), free.summary["flvr_at_maturity"].get<double>());
  EXPECT_GT(costly.summary["total_cost"].get<double>(), 0.0);
  EXPECT_EQ(free.summary["total_cost"].get<double>(), 0.0);
}

TEST(Panel, ShortTermsOnSyntheticData) {
  auto f = make_fixture("panel_short", testing::random_walk(1500, 100, 0.2, 5), 2.0);
  f.config.term_min_months = 3;
  f.config.term_max_months = 4;
  f.config.histogram_bins = 10;
  const auto r = cmd_panel(f.config);
  const auto rows = lines(f.config.out_dir / "panel.csv");
  EXPECT_EQ(rows[0], "contract_id,start,maturity,V,max_abs_error");
  EXPECT_EQ(r.summary["n"].get<std::size_t>(), rows.size() - 1);
  EXPECT_EQ(lines(f.config.out_dir / "histogram_flvr.csv").size(), 11u);
  ASSERT_FALSE(r.summary["test"].is_null());
  EXPECT_GT(r.summary["std_flvr"].get<double>(), 0.0);
  EXPECT_EQ(r.summary["reference_count"], 8475);
  EXPECT_TRUE(fs::exists(f.config.out_dir / "test_report.csv"));
}

TEST(TestCommand, TwoContractsByHand) {
  const auto dir = temp_dir("test_two");
  write_text(dir / "panel.csv",
             "contract_id,start,maturity,V,max_abs_error\n"
             "0,2000-01-03,2015-01-02,0.1,0.0005\n"
             "1,2000-02-01,2015-02-02,0.3,0.0007\n");
  RunConfig c;
  c.panel_csv = dir / "panel.csv";
  c.out_dir = dir / "out";
  c.alpha = 0.05;
  const auto r = cmd_test(c);
  EXPECT_NEAR(r.summary["mean"].get<double>(), 0.2, 1e-15);
  EXPECT_NEAR(r.summary["stddev"].get<double>(), std::sqrt(0.02), 1e-15);
  EXPECT_NEAR(r.summary["t_statistic"].get<double>(), 2.0, 1e-12);
  EXPECT_EQ(r.summary["degrees_of_freedom"].get<double>(), 1.0);
  // t(0.95, 1) = tan(0.45 pi) = 6.3138, so T = 2 does not reject.
  EXPECT_NEAR(r.summary["critical_value"].get<double>(), std::tan(0.45 * M_PI), 1e-8);
  EXPECT_FALSE(r.summary["reject_h0"].get<bool>());
  EXPECT_NE(r.text.find("do not reject"), std::string::npos);
}

TEST(TestCommand, RowOrderDoesNotMatter) {
  const auto dir = temp_dir("test_shuffle");
  std::vector<std::string> rows;
  auto v = testing::random_walk(500, 0.17, 0.3, 8);
  for (std::size_t i = 0; i < v.size(); ++i)
    rows.push_back(std::to_string(i) + ",2000-01-03,2015-01-02," + format_number(v[i] - 0.17) + ",0.0004");
  auto write = [&](const fs::path& p) {
    std::string text = "contract_id,start,maturity,V,max_abs_error\n";
    for (const auto& r : rows) text += r + "\n";
    write_text(p, text);
  };
  write(dir / "a.csv");
  std::shuffle(rows.begin(), rows.end(), std::mt19937_64(1));
  write(dir / "b.csv");
  RunConfig c;
  c.out_dir = dir / "out";
  c.panel_csv = dir / "a.csv";
  const auto a = cmd_test(c);
  c.panel_csv = dir / "b.csv";
  const auto b = cmd_test(c);
  for (const auto* key : {"mean", "stddev", "t_statistic", "threshold"}) EXPECT_EQ(a.summary[key], b.summary[key]) << key;
  EXPECT_EQ(a.summary["reject_h0"], b.summary["reject_h0"]);
}

TEST(TestCommand, MalformedPanelIsDataError) {
  const auto dir = temp_dir("test_bad");
  write_text(dir / "panel.csv", "contract_id,start,maturity,V,max_abs_error\n0,2000-01-03,2015-01-02,abc,0.1\n");
  RunConfig c;
  c.out_dir = dir / "out";
  c.panel_csv = dir / "panel.csv";
  EXPECT_THROW(cmd_test(c), DataError);
  write_text(dir / "panel.csv", "a,b\n1,2\n");
  EXPECT_THROW(cmd_test(c), DataError);
}

TEST(Config, ParsesAllSections) {
  const auto c = parse_config(json::parse(R"({
    "index": {"path": "i.csv", "value_column": "tr"},
    "rates": {"path": "r.csv", "delimiter": ";"},
    "out": "o", "cost_bp": 50,
    "fit": {"tau_lo": -9, "tau_hi": 1, "grid_points": 11},
    "hedge": {"start": "2001-02-03", "fraction_source": "price"},
    "panel": {"term_min_months": 12, "term_max_months": 24, "alpha": 0.01, "bins": 7},
    "simulate": {"seed": 9, "paths": 3, "step": 0.01}
  })"));
  EXPECT_EQ(c.index.schema.value_column, "tr");
  EXPECT_EQ(c.rates.schema.delimiter, ';');
  EXPECT_EQ(c.out_dir, "o");
  EXPECT_EQ(c.cost_bp, 50);
  EXPECT_EQ(c.hedge_options().costs.proportional_rate, 0.005);
  EXPECT_EQ(*c.tau_search.lo, -9);
  EXPECT_EQ(c.tau_search.grid_points, 11);
  EXPECT_EQ(format_date(*c.hedge_start), "2001-02-03");
  EXPECT_EQ(c.fraction_source, HedgeFractionSource::kTheoreticalPrice);
  EXPECT_EQ(c.term_min_months, 12);
  EXPECT_EQ(c.histogram_bins, 7);
  EXPECT_EQ(c.sim.config.seed, 9u);
  EXPECT_EQ(c.sim.config.n_paths, 3);
  // Round trip through the canonical form.
  EXPECT_EQ(to_json(parse_config(to_json(c))), to_json(c));
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config(json::parse(R"({"bogus": 1})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"panel": {"alpha": "x"}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"hedge": {"start": "2001-13-01"}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"hedge": {"fraction_source": "delta"}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"([1, 2])")), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Simulate, SeedReproducibility) {
  const auto dir = temp_dir("simulate");
  RunConfig c;
  c.out_dir = dir / "a";
  c.sim.config.horizon = 2.0;
  c.sim.config.step = 1.0 / 64;
  c.sim.config.n_paths = 5;
  c.sim.oracle_paths = 2000;
  const auto a = cmd_simulate(c);
  c.out_dir = dir / "b";
  const auto b = cmd_simulate(c);
  for (const auto* name : {"paths.csv", "oracle.csv", "convergence.csv"})
    EXPECT_EQ(read_text(dir / "a" / name), read_text(dir / "b" / name)) << name;
  c.sim.config.seed += 1;
  c.out_dir = dir / "c";
  cmd_simulate(c);
  EXPECT_NE(read_text(dir / "a" / "paths.csv"), read_text(dir / "c" / "paths.csv"));
  EXPECT_EQ(a.summary["convergence_pairs"], 3);
  EXPECT_EQ(lines(dir / "a" / "oracle.csv").size(), 6u);
}

// The remaining tests drive the built executable.
int run_tool(const std::string& args) {
  const int status = std::system((std::string(FLVR_TOOL) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Tool, ExitCodes) {
  auto f = make_fixture("tool_codes", testing::random_walk(600, 100, 0.01, 2), 3.0);
  const std::string io = " --index " + f.config.index.path.string() + " --rates " + f.config.rates.path.string() +
                         " --out " + (f.dir / "out").string();
  EXPECT_EQ(run_tool("ingest" + io), kOk);
  EXPECT_EQ(run_tool("fit --index /nonexistent.csv --rates /nonexistent.csv"), kConfigError);
  EXPECT_EQ(run_tool("fit" + io + " --config /nonexistent.json"), kConfigError);
  EXPECT_EQ(run_tool("frobnicate"), kConfigError);
  write_text(f.dir / "bad.csv", "date,value\n2000-01-03,1\n2000-01-03,2\n");
  EXPECT_EQ(run_tool("ingest --index " + (f.dir / "bad.csv").string() + " --rates " + f.config.rates.path.string() +
                     " --out " + (f.dir / "out").string()),
            kDataError);
  // A maturity before the start cannot be hedged.
  EXPECT_EQ(run_tool("hedge" + io + " --start 2001-01-01 --maturity 2000-06-01"), kConfigError);
}

TEST(Tool, FlagsOverrideConfigFile) {
  auto f = make_fixture("tool_override", testing::random_walk(600, 100, 0.01, 4), 3.0);
  write_text(f.dir / "run.json", json{{"index", {{"path", f.config.index.path.string()}}},
                                      {"rates", {{"path", f.config.rates.path.string()}}},
                                      {"out", (f.dir / "from_config").string()},
                                      {"cost_bp", 0}}
                                     .dump());
  ASSERT_EQ(run_tool("hedge --config " + (f.dir / "run.json").string() + " --cost-bp 50 --out " +
                     (f.dir / "from_flag").string()),
            kOk);
  EXPECT_FALSE(fs::exists(f.dir / "from_config"));
  const auto summary = json::parse(read_text(f.dir / "from_flag" / "hedge_summary.json"));
  EXPECT_EQ(summary["cost_bp"].get<double>(), 50.0);
}

}  // namespace
}  // namespace flvr::cli
