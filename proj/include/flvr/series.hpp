#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "flvr/date.hpp"

namespace flvr {

/// Dated observations on a strictly increasing calendar grid.
struct Series {
  std::vector<Date> dates;
  Eigen::VectorXd values;

  std::size_t size() const { return dates.size(); }
  bool empty() const { return dates.empty(); }
};

/// Raw input series (index levels or T-bill rates in percent).
struct ObservationSeries : Series {
  std::size_t skipped_rows = 0;  ///< rows with a blank or missing value
};

/// Roll-over T-bill account in units of its value at the first date.
struct SavingsAccount : Series {};

/// Index level divided by the savings account.
struct DiscountedIndex : Series {};

/// Index of the first date >= d, or size() if none.
std::size_t lower_bound_index(const std::vector<Date>& dates, Date d);

}  // namespace flvr
