#include "flvr/cli/run_config.hpp"

#include <fstream>
#include <set>

#include "flvr/errors.hpp"

namespace flvr::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

// null means "not set" for optional values.
bool present(const json& j, const char* key) { return j.contains(key) && !j.at(key).is_null(); }

void read_date(const json& j, const char* key, std::optional<Date>& out) {
  if (present(j, key)) {
    try {
      out = parse_date(j.at(key).get<std::string>());
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
  }
}

InputSpec parse_input(const json& j, InputSpec spec, const std::string& where) {
  reject_unknown(j, {"path", "date_column", "value_column", "delimiter"}, where);
  if (j.contains("path")) spec.path = j.at("path").get<std::string>();
  read(j, "date_column", spec.schema.date_column);
  read(j, "value_column", spec.schema.value_column);
  if (j.contains("delimiter")) {
    const auto d = j.at("delimiter").get<std::string>();
    if (d.size() != 1) throw ConfigError(where + ".delimiter: must be one character");
    spec.schema.delimiter = d[0];
  }
  return spec;
}

HedgeFractionSource parse_source(const std::string& s) {
  if (s == "portfolio") return HedgeFractionSource::kPortfolio;
  if (s == "price") return HedgeFractionSource::kTheoreticalPrice;
  throw ConfigError("fraction_source must be 'portfolio' or 'price'");
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  try {
    reject_unknown(j, {"index", "rates", "out", "max_rate", "fit", "hedge", "cost_bp", "panel", "simulate"},
                   "config");
    if (j.contains("index")) c.index = parse_input(j.at("index"), c.index, "index");
    if (j.contains("rates")) c.rates = parse_input(j.at("rates"), c.rates, "rates");
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    read(j, "max_rate", c.max_rate);
    read(j, "cost_bp", c.cost_bp);
    if (j.contains("fit")) {
      const auto& f = j.at("fit");
      reject_unknown(f, {"tau_lo", "tau_hi", "grid_points", "tolerance"}, "fit");
      if (present(f, "tau_lo")) c.tau_search.lo = f.at("tau_lo").get<double>();
      if (present(f, "tau_hi")) c.tau_search.hi = f.at("tau_hi").get<double>();
      read(f, "grid_points", c.tau_search.grid_points);
      read(f, "tolerance", c.tau_search.tolerance);
    }
    if (j.contains("hedge")) {
      const auto& h = j.at("hedge");
      reject_unknown(h, {"start", "maturity", "fraction_source"}, "hedge");
      read_date(h, "start", c.hedge_start);
      read_date(h, "maturity", c.hedge_maturity);
      if (h.contains("fraction_source")) c.fraction_source = parse_source(h.at("fraction_source").get<std::string>());
    }
    if (j.contains("panel")) {
      const auto& p = j.at("panel");
      reject_unknown(p, {"term_min_months", "term_max_months", "init_from", "init_to", "alpha", "bins", "csv"},
                     "panel");
      read(p, "term_min_months", c.term_min_months);
      read(p, "term_max_months", c.term_max_months);
      read_date(p, "init_from", c.init_from);
      read_date(p, "init_to", c.init_to);
      read(p, "alpha", c.alpha);
      read(p, "bins", c.histogram_bins);
      if (present(p, "csv")) c.panel_csv = p.at("csv").get<std::string>();
    }
    if (j.contains("simulate")) {
      const auto& s = j.at("simulate");
      reject_unknown(s, {"s0", "tau0", "slope", "horizon", "step", "paths", "seed", "oracle_paths",
                         "paths_written", "convergence_steps"},
                     "simulate");
      auto& sc = c.sim.config;
      read(s, "s0", sc.s0);
      read(s, "tau0", sc.tau0);
      read(s, "slope", sc.slope);
      read(s, "horizon", sc.horizon);
      read(s, "step", sc.step);
      read(s, "paths", sc.n_paths);
      read(s, "seed", sc.seed);
      read(s, "oracle_paths", c.sim.oracle_paths);
      read(s, "paths_written", c.sim.paths_written);
      read(s, "convergence_steps", c.sim.convergence_steps);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return parse_config(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json to_json(const RunConfig& c) {
  const auto input = [](const InputSpec& s) {
    return json{{"path", s.path.string()},
                {"date_column", s.schema.date_column},
                {"value_column", s.schema.value_column},
                {"delimiter", std::string(1, s.schema.delimiter)}};
  };
  const auto opt_date = [](const std::optional<Date>& d) { return d ? json(format_date(*d)) : json(nullptr); };
  const auto opt_num = [](const std::optional<double>& d) { return d ? json(*d) : json(nullptr); };
  const auto& sc = c.sim.config;
  return json{
      {"index", input(c.index)},
      {"rates", input(c.rates)},
      {"out", c.out_dir.string()},
      {"max_rate", c.max_rate},
      {"cost_bp", c.cost_bp},
      {"fit",
       {{"tau_lo", opt_num(c.tau_search.lo)},
        {"tau_hi", opt_num(c.tau_search.hi)},
        {"grid_points", c.tau_search.grid_points},
        {"tolerance", c.tau_search.tolerance}}},
      {"hedge",
       {{"start", opt_date(c.hedge_start)},
        {"maturity", opt_date(c.hedge_maturity)},
        {"fraction_source", c.fraction_source == HedgeFractionSource::kPortfolio ? "portfolio" : "price"}}},
      {"panel",
       {{"term_min_months", c.term_min_months},
        {"term_max_months", c.term_max_months},
        {"init_from", opt_date(c.init_from)},
        {"init_to", opt_date(c.init_to)},
        {"alpha", c.alpha},
        {"bins", c.histogram_bins},
        {"csv", c.panel_csv ? json(c.panel_csv->string()) : json(nullptr)}}},
      {"simulate",
       {{"s0", sc.s0},
        {"tau0", sc.tau0},
        {"slope", sc.slope},
        {"horizon", sc.horizon},
        {"step", sc.step},
        {"paths", sc.n_paths},
        {"seed", sc.seed},
        {"oracle_paths", c.sim.oracle_paths},
        {"paths_written", c.sim.paths_written},
        {"convergence_steps", c.sim.convergence_steps}}},
  };
}

}  // namespace flvr::cli
