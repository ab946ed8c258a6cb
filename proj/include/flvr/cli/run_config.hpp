#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flvr/activity_time.hpp"
#include "flvr/azcb.hpp"
#include "flvr/market_data.hpp"
#include "flvr/mmm_sim.hpp"

namespace flvr::cli {

struct InputSpec {
  std::filesystem::path path;
  CsvSchema schema;
};

struct SimSettings {
  SimConfig config{1.0, -1.5, 0.05, 16.0, 1.0 / 252.0, 200, 20250311};
  int oracle_paths = 1000000;
  int paths_written = 10;
  std::vector<double> convergence_steps;  ///< years, decreasing; empty = derived from step
};

/// Everything a run needs. Loaded from a JSON file, then overridden by flags.
struct RunConfig {
  InputSpec index{{}, {"date", "value", ',', ValueKind::kLevel}};
  InputSpec rates{{}, {"date", "value", ',', ValueKind::kRate}};
  std::filesystem::path out_dir = "out";
  double max_rate = 40.0;

  TauSearch tau_search;

  std::optional<Date> hedge_start;
  std::optional<Date> hedge_maturity;
  double cost_bp = 0.0;
  HedgeFractionSource fraction_source = HedgeFractionSource::kPortfolio;

  int term_min_months = 180;
  int term_max_months = 204;
  std::optional<Date> init_from;
  std::optional<Date> init_to;
  double alpha = 1e-6;
  int histogram_bins = 50;
  std::optional<std::filesystem::path> panel_csv;

  SimSettings sim;

  HedgeOptions hedge_options() const { return {{cost_bp / 1e4}, fraction_source}; }
};

/// Parses the documented JSON schema (see README). Unknown keys are errors.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form of the effective configuration (used for hashing).
nlohmann::json to_json(const RunConfig& config);

}  // namespace flvr::cli
