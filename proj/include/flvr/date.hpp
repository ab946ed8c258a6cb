#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace flvr {

using Date = std::chrono::sys_days;

/// Parses "YYYY-MM-DD". Throws DataError on malformed or invalid dates.
Date parse_date(std::string_view text);

std::string format_date(Date d);

inline long days_between(Date from, Date to) {
  return static_cast<long>((to - from).count());
}

/// Actual days / 365.25.
inline double years_between(Date from, Date to) {
  return static_cast<double>(days_between(from, to)) / 365.25;
}

/// Same day-of-month `months` later; the day is clamped to the target month's
/// last day (Jan 31 + 1 month = Feb 28/29).
Date add_months(Date d, int months);

}  // namespace flvr
