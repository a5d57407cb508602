#include <doctest.h>

#include <cmath>

#include "hetmarket/errors.hpp"
#include "hetmarket/series.hpp"

using namespace hetmarket;

TEST_SUITE("series") {

TEST_CASE("dates parse and print") {
  const Date d = Date::parse("2015-12-31");
  CHECK(d.iso() == "2015-12-31");
  CHECK(d.year() == 2015);
  CHECK(d.month() == 12u);
  CHECK(d.month_key() == 2015 * 12 + 11);
  CHECK(Date(1970, 1, 1).serial() == 0);
  CHECK(Date(2000, 2, 29).iso() == "2000-02-29");
  CHECK(Date::parse("2024-02-29") < Date::parse("2024-03-01"));
  CHECK_THROWS_AS(Date::parse("2023-02-29"), DataError);
  CHECK_THROWS_AS(Date::parse("2023-13-01"), DataError);
  CHECK_THROWS_AS(Date::parse("2023/01/01"), DataError);
  CHECK_THROWS_AS(Date::parse("23-01-01"), DataError);
  CHECK_THROWS_AS(Date::parse("2023-0a-01"), DataError);
  CHECK_THROWS_AS(Date(2021, 4, 31), DataError);
}

TEST_CASE("business days") {
  const Date fri(2024, 3, 8);
  CHECK(fri.is_weekday());
  CHECK_FALSE(Date(2024, 3, 9).is_weekday());
  CHECK_FALSE(Date(2024, 3, 10).is_weekday());
  CHECK(fri.next_business_day() == Date(2024, 3, 11));
  CHECK(Date(2024, 3, 9).next_business_day() == Date(2024, 3, 11));

  const auto days = business_days(Date(2024, 3, 9), 12);
  REQUIRE(days.size() == 12);
  CHECK(days.front() == Date(2024, 3, 11));
  for (const auto& d : days) CHECK(d.is_weekday());
  CHECK(missing_business_days(days).empty());
  CHECK(days.back() == Date(2024, 3, 26));

  std::vector<Date> gappy{Date(2024, 3, 8), Date(2024, 3, 13), Date(2024, 3, 14)};
  const auto miss = missing_business_days(gappy);
  REQUIRE(miss.size() == 2);
  CHECK(miss[0] == Date(2024, 3, 11));
  CHECK(miss[1] == Date(2024, 3, 12));
}

TEST_CASE("series validation") {
  const auto days = business_days(Date(2020, 1, 1), 3);
  InformationSeries info{days, {0.1, -1.0, 1.0}};
  CHECK_NOTHROW(info.validate());
  info.h[1] = -1.0001;
  CHECK_THROWS_AS(info.validate(), DataError);
  info.h[1] = NAN;
  CHECK_THROWS_AS(info.validate(), DataError);
  info.h = {0.1, 0.2};
  CHECK_THROWS_AS(info.validate(), DataError);
  InformationSeries dup{{days[0], days[0]}, {0.0, 0.0}};
  CHECK_THROWS_AS(dup.validate(), DataError);

  PriceSeries px{days, {1.0, 2.0, 3.0}, {1.5, 2.5, 3.5}};
  CHECK_NOTHROW(px.validate());
  CHECK(px.log_close()[1] == std::log(2.5));
  px.close[2] = 0.0;
  CHECK_THROWS_AS(px.validate(), DataError);
  px.close[2] = INFINITY;
  CHECK_THROWS_AS(px.validate(), DataError);
  PriceSeries back{{days[2], days[1]}, {1.0, 1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(back.validate(), DataError);
}

TEST_CASE("date alignment") {
  const auto a = business_days(Date(2020, 1, 1), 10);
  std::vector<Date> b{a[1], a[3], a[4], a[9], a[9].plus_days(30)};
  const auto al = align_dates(a, b);
  CHECK(al.left == std::vector<std::size_t>{1, 3, 4, 9});
  CHECK(al.right == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(align_dates(a, {}).left.empty());
}

}  // TEST_SUITE
