#include "flvr/date.hpp"

#include <charconv>

#include "flvr/errors.hpp"

namespace flvr {

namespace {

int parse_int(std::string_view s, std::string_view whole) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw DataError("unparsable date '" + std::string(whole) + "'");
  return v;
}

}  // namespace

Date parse_date(std::string_view text) {
  using namespace std::chrono;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw DataError("unparsable date '" + std::string(text) + "'");
  const year_month_day ymd{year{parse_int(text.substr(0, 4), text)},
                           month{static_cast<unsigned>(parse_int(text.substr(5, 2), text))},
                           day{static_cast<unsigned>(parse_int(text.substr(8, 2), text))}};
  if (!ymd.ok()) throw DataError("invalid calendar date '" + std::string(text) + "'");
  return sys_days{ymd};
}

std::string format_date(Date d) {
  using namespace std::chrono;
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Date add_months(Date d, int months) {
  using namespace std::chrono;
  const year_month_day ymd{d};
  const year_month ym = year_month{ymd.year(), ymd.month()} + std::chrono::months{months};
  const day last = year_month_day_last{ym.year(), month_day_last{ym.month()}}.day();
  return sys_days{year_month_day{ym.year(), ym.month(), std::min(ymd.day(), last)}};
}

}  // namespace flvr
