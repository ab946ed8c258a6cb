#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "flvr/activity_time.hpp"
#include "flvr/azcb.hpp"
#include "flvr/cli/run_config.hpp"
#include "flvr/market_data.hpp"
#include "flvr/panel.hpp"

namespace flvr::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kDataError = 1, kConfigError = 2, kNumericalError = 3 };

struct MarketData {
  ObservationSeries index;
  ObservationSeries rates;
  RateAlignment aligned;
  SavingsAccount account;
  DiscountedIndex discounted;
  JoinReport join;
};

MarketData load_market(const RunConfig& config);

struct FitResult {
  IndexRange window;
  InitialTauEstimate estimate;
  ActivityTimePath tau;  ///< full history at the estimated tau0
};

FitResult fit_market(const DiscountedIndex& s, const RunConfig& config);

/// Contract from the configured start/maturity dates (defaults: the end of the
/// fit window and the last date), each snapped forward to the next data date.
AZCBContract configured_contract(const DiscountedIndex& s, const FitResult& fit, const RunConfig& config);

std::string format_number(double v);

void write_tau_csv(std::ostream& out, const ActivityTimePath& tau, const TrendLine& line);
void write_ledger_csv(std::ostream& out, const HedgeLedger& ledger);
void write_panel_csv(std::ostream& out, const PanelResult& result);
std::vector<ContractOutcome> read_panel_csv(const std::filesystem::path& path);
void write_histogram_csv(std::ostream& out, const Histogram& h);
void write_test_report_csv(std::ostream& out, const TestReport& report);
std::string format_test_report(const TestReport& report);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);
std::string file_checksum(const std::filesystem::path& path);

struct CommandResult {
  nlohmann::json summary;
  std::vector<std::filesystem::path> outputs;
  std::string text;  ///< human-readable report, if any
};

// Each command writes its outputs to config.out_dir together with
// <name>_summary.json and manifest_<name>.json.
CommandResult cmd_ingest(const RunConfig& config);
CommandResult cmd_fit(const RunConfig& config);
CommandResult cmd_hedge(const RunConfig& config);
CommandResult cmd_panel(const RunConfig& config);
CommandResult cmd_test(const RunConfig& config);
CommandResult cmd_simulate(const RunConfig& config);

}  // namespace flvr::cli
