#include "hetmarket/series.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "hetmarket/errors.hpp"

namespace hetmarket {

namespace chr = std::chrono;

Date::Date(int y, unsigned m, unsigned d) {
  const chr::year_month_day ymd{chr::year{y}, chr::month{m}, chr::day{d}};
  if (!ymd.ok()) throw DataError("invalid calendar date");
  day_ = chr::sys_days{ymd};
}

Date Date::parse(std::string_view text) {
  auto bad = [&] { return DataError("malformed date '" + std::string(text) + "'"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  int parts[3] = {0, 0, 0};
  const std::size_t starts[3] = {0, 5, 8};
  const std::size_t lens[3] = {4, 2, 2};
  for (int k = 0; k < 3; ++k) {
    for (std::size_t c = 0; c < lens[k]; ++c) {
      const char ch = text[starts[k] + c];
      if (ch < '0' || ch > '9') throw bad();
      parts[k] = parts[k] * 10 + (ch - '0');
    }
  }
  const chr::year_month_day ymd{chr::year{parts[0]}, chr::month{static_cast<unsigned>(parts[1])},
                           chr::day{static_cast<unsigned>(parts[2])}};
  if (!ymd.ok()) throw bad();
  return Date(chr::sys_days{ymd});
}

std::string Date::iso() const {
  const chr::year_month_day ymd{day_};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

int Date::year() const { return static_cast<int>(chr::year_month_day{day_}.year()); }

unsigned Date::month() const { return static_cast<unsigned>(chr::year_month_day{day_}.month()); }

int Date::month_key() const { return year() * 12 + static_cast<int>(month()) - 1; }

bool Date::is_weekday() const {
  const chr::weekday wd{day_};
  return wd != chr::Saturday && wd != chr::Sunday;
}

Date Date::next_business_day() const {
  Date d = plus_days(1);
  while (!d.is_weekday()) d = d.plus_days(1);
  return d;
}

std::vector<Date> missing_business_days(const std::vector<Date>& dates) {
  std::vector<Date> missing;
  for (std::size_t k = 1; k < dates.size(); ++k) {
    for (Date d = dates[k - 1].next_business_day(); d < dates[k]; d = d.next_business_day()) {
      missing.push_back(d);
    }
  }
  return missing;
}

std::vector<Date> business_days(Date first, std::size_t count) {
  std::vector<Date> out;
  out.reserve(count);
  Date d = first;
  while (!d.is_weekday()) d = d.plus_days(1);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(d);
    d = d.next_business_day();
  }
  return out;
}

namespace {

void check_increasing(const std::vector<Date>& dates, const char* who) {
  for (std::size_t k = 1; k < dates.size(); ++k) {
    if (!(dates[k - 1] < dates[k])) {
      throw DataError(std::string(who) + ": dates not strictly increasing at " + dates[k].iso());
    }
  }
}

}  // namespace

void InformationSeries::validate() const {
  if (dates.size() != h.size()) throw DataError("information series: length mismatch");
  check_increasing(dates, "information series");
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (!(std::abs(h[k]) <= 1.0)) {
      throw DataError("information series: h outside [-1, 1] on " + dates[k].iso());
    }
  }
}

void PriceSeries::validate() const {
  if (dates.size() != open.size() || dates.size() != close.size()) {
    throw DataError("price series: length mismatch");
  }
  check_increasing(dates, "price series");
  for (std::size_t k = 0; k < dates.size(); ++k) {
    if (!(open[k] > 0.0) || !(close[k] > 0.0) || !std::isfinite(open[k]) ||
        !std::isfinite(close[k])) {
      throw DataError("price series: non-positive price on " + dates[k].iso());
    }
  }
}

std::vector<double> PriceSeries::log_close() const {
  std::vector<double> out(close.size());
  for (std::size_t k = 0; k < close.size(); ++k) out[k] = std::log(close[k]);
  return out;
}

Alignment align_dates(const std::vector<Date>& left, const std::vector<Date>& right) {
  Alignment a;
  std::size_t i = 0, j = 0;
  while (i < left.size() && j < right.size()) {
    if (left[i] < right[j]) {
      ++i;
    } else if (right[j] < left[i]) {
      ++j;
    } else {
      a.left.push_back(i++);
      a.right.push_back(j++);
    }
  }
  return a;
}

}  // namespace hetmarket
