#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "flvr/series.hpp"

namespace flvr {

enum class ValueKind {
  kLevel,  ///< index or account level: must be strictly positive
  kRate,   ///< rate in percent: any finite value
};

struct CsvSchema {
  std::string date_column = "date";
  std::string value_column = "value";
  char delimiter = ',';
  ValueKind kind = ValueKind::kLevel;
};

/// Reads a headered CSV. Rows whose value cell is blank or "." are skipped and
/// counted; rows are sorted by date, and a duplicate date is an error.
ObservationSeries load_series(const std::filesystem::path& path, const CsvSchema& schema);
ObservationSeries parse_series(std::istream& in, const CsvSchema& schema,
                               const std::string& source = "<stream>");

/// Canonical "date,<header>" CSV with round-trip exact values.
void write_series_csv(std::ostream& out, const Series& series,
                      const std::string& value_header = "value");

struct RateAlignment {
  ObservationSeries rates;       ///< rates on the requested grid
  std::size_t carried = 0;       ///< grid dates that reused an earlier rate
  std::size_t dropped = 0;       ///< grid dates before the first rate observation
};

/// Puts rates on `grid`, carrying the last available rate forward to dates
/// without an observation. Grid dates before the first rate are dropped.
RateAlignment align_rates(const ObservationSeries& rates, const std::vector<Date>& grid);

/// Daily roll-over of 3-month bills quoted on a discount basis:
///   A_{i+1} = A_i (1 - r (90 - d)/36000) / (1 - r 90/36000),
/// r the rate at t_{i+1}, d the actual days from t_i to t_{i+1}, A_0 = 1.
SavingsAccount build_savings_account(const ObservationSeries& tbill, double max_rate = 40.0);

struct JoinReport {
  std::size_t dropped_index = 0;    ///< index dates absent from the account
  std::size_t dropped_account = 0;  ///< account dates absent from the index
};

/// index / account on the intersection of the two grids.
DiscountedIndex discount_index(const ObservationSeries& index, const SavingsAccount& account,
                               JoinReport* report = nullptr);

}  // namespace flvr
