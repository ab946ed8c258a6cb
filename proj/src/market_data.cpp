#include "flvr/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "flvr/errors.hpp"

namespace flvr {

std::size_t lower_bound_index(const std::vector<Date>& dates, Date d) {
  return static_cast<std::size_t>(std::lower_bound(dates.begin(), dates.end(), d) - dates.begin());
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw DataError(where + ": unparsable number '" + std::string(s) + "'");
  return v;
}

void check_grid(const Series& s, const std::string& what) {
  if (s.size() < 2) throw DataError(what + ": fewer than 2 observations");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s.dates[i - 1] < s.dates[i]))
      throw DataError(what + ": duplicate date " + format_date(s.dates[i]));
}

}  // namespace

ObservationSeries parse_series(std::istream& in, const CsvSchema& schema, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": missing header row");
  const auto header = split(line, schema.delimiter);
  const auto find_col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError(source + ": no column named '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t date_col = find_col(schema.date_column);
  const std::size_t value_col = find_col(schema.value_column);

  std::vector<std::pair<Date, double>> rows;
  std::size_t skipped = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, schema.delimiter);
    const std::string where = source + ":" + std::to_string(line_no);
    if (date_col >= cells.size()) throw DataError(where + ": missing date cell");
    const Date d = parse_date(cells[date_col]);
    const std::string_view cell = value_col < cells.size() ? cells[value_col] : std::string_view{};
    if (cell.empty() || cell == ".") {
      ++skipped;
      continue;
    }
    const double v = parse_number(cell, where);
    if (!std::isfinite(v)) throw DataError(where + ": non-finite value");
    if (schema.kind == ValueKind::kLevel && v <= 0.0)
      throw DataError(where + ": level must be strictly positive");
    rows.emplace_back(d, v);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  ObservationSeries out;
  out.skipped_rows = skipped;
  out.dates.reserve(rows.size());
  out.values.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.dates.push_back(rows[i].first);
    out.values[static_cast<Eigen::Index>(i)] = rows[i].second;
  }
  check_grid(out, source);
  return out;
}

ObservationSeries load_series(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_series(in, schema, path.string());
}

void write_series_csv(std::ostream& out, const Series& series, const std::string& value_header) {
  out << "date," << value_header << '\n';
  char buf[32];
  for (std::size_t i = 0; i < series.size(); ++i) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, series.values[static_cast<Eigen::Index>(i)]);
    out << format_date(series.dates[i]) << ',' << std::string_view(buf, end - buf) << '\n';
  }
}

RateAlignment align_rates(const ObservationSeries& rates, const std::vector<Date>& grid) {
  RateAlignment out;
  std::vector<double> values;
  std::size_t j = 0;  // next rate observation not yet consumed
  bool have_rate = false;
  double current = 0.0;
  for (const Date d : grid) {
    bool exact = false;
    while (j < rates.size() && rates.dates[j] <= d) {
      current = rates.values[static_cast<Eigen::Index>(j)];
      exact = rates.dates[j] == d;
      have_rate = true;
      ++j;
    }
    if (!have_rate) {
      ++out.dropped;
      continue;
    }
    if (!exact) ++out.carried;
    out.rates.dates.push_back(d);
    values.push_back(current);
  }
  out.rates.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return out;
}

SavingsAccount build_savings_account(const ObservationSeries& tbill, double max_rate) {
  if (tbill.size() < 1) throw DataError("savings account: empty rate series");
  SavingsAccount acc;
  acc.dates = tbill.dates;
  acc.values.resize(tbill.values.size());
  acc.values[0] = 1.0;
  for (std::size_t i = 1; i < tbill.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double r = tbill.values[k] / 100.0;
    const long d = days_between(tbill.dates[i - 1], tbill.dates[i]);
    const std::string when = format_date(tbill.dates[i]);
    if (d <= 0) throw DataError("savings account: non-increasing date at " + when);
    if (!(tbill.values[k] >= 0.0 && tbill.values[k] < max_rate))
      throw DataError("savings account: rate " + std::to_string(tbill.values[k]) +
                      " outside [0, " + std::to_string(max_rate) + ") at " + when);
    const double num = 1.0 - r * static_cast<double>(90 - d) / 360.0;
    const double den = 1.0 - r * 90.0 / 360.0;
    if (num <= 0.0 || den <= 0.0)
      throw DataError("savings account: nonpositive discount factor at " + when);
    acc.values[k] = acc.values[k - 1] * num / den;
  }
  return acc;
}

DiscountedIndex discount_index(const ObservationSeries& index, const SavingsAccount& account,
                               JoinReport* report) {
  DiscountedIndex out;
  std::vector<double> values;
  JoinReport rep;
  std::size_t i = 0, j = 0;
  while (i < index.size() && j < account.size()) {
    if (index.dates[i] < account.dates[j]) {
      ++rep.dropped_index;
      ++i;
    } else if (account.dates[j] < index.dates[i]) {
      ++rep.dropped_account;
      ++j;
    } else {
      out.dates.push_back(index.dates[i]);
      values.push_back(index.values[static_cast<Eigen::Index>(i)] /
                       account.values[static_cast<Eigen::Index>(j)]);
      ++i;
      ++j;
    }
  }
  rep.dropped_index += index.size() - i;
  rep.dropped_account += account.size() - j;
  if (out.dates.empty()) throw DataError("discount_index: index and account share no dates");
  out.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  if (report) *report = rep;
  return out;
}

}  // namespace flvr
