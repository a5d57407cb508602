#pragma once

// Calendar dates and the daily input series (information flow, prices).

#include <chrono>
#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace hetmarket {

/// A calendar day, stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  explicit Date(std::chrono::sys_days day) : day_(day) {}
  Date(int year, unsigned month, unsigned day);

  /// Parses YYYY-MM-DD; throws DataError on malformed input.
  static Date parse(std::string_view text);
  std::string iso() const;

  int year() const;
  unsigned month() const;
  /// year * 12 + (month - 1); identifies a calendar month.
  int month_key() const;
  bool is_weekday() const;
  long serial() const { return day_.time_since_epoch().count(); }

  Date next_business_day() const;
  Date plus_days(int n) const { return Date(day_ + std::chrono::days(n)); }

  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days day_{};
};

/// Weekdays missing between consecutive dates (public holidays included).
std::vector<Date> missing_business_days(const std::vector<Date>& dates);

/// `count` consecutive weekdays starting at `first` (moved forward to a weekday).
std::vector<Date> business_days(Date first, std::size_t count);

struct InformationSeries {
  std::vector<Date> dates;
  std::vector<double> h;

  /// Strictly increasing dates, |h| <= 1, equal lengths. Throws DataError.
  void validate() const;
};

struct PriceSeries {
  std::vector<Date> dates;
  std::vector<double> open;
  std::vector<double> close;

  /// Strictly increasing dates, positive prices, equal lengths. Throws DataError.
  void validate() const;
  std::vector<double> log_close() const;
  std::size_t size() const noexcept { return dates.size(); }
};

/// Indices of the common dates of two strictly increasing date vectors.
struct Alignment {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
};
Alignment align_dates(const std::vector<Date>& left, const std::vector<Date>& right);

}  // namespace hetmarket
