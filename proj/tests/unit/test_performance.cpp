#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hetmarket/errors.hpp"
#include "hetmarket/performance.hpp"
#include "support.hpp"

using namespace hetmarket;
using doctest::Approx;

namespace {

// Spreadsheet-style oracle: one column per quantity, nothing shared with the library.
struct Oracle {
  double mean, vol, mdd, var5, alpha, beta, sharpe, sortino;
};

Oracle oracle(const std::vector<double>& r, const std::vector<double>& b) {
  const std::size_t n = r.size();
  long double sum = 0;
  for (double x : r) sum += x;
  const long double m = sum / n;
  long double dev = 0;
  for (double x : r) dev += (x - m) * (x - m);
  const long double sd = std::sqrt(dev / (n - 1));

  std::vector<long double> cum(n);
  long double run = 0, peak = 0, mdd = 0;
  for (std::size_t k = 0; k < n; ++k) {
    run += r[k];
    cum[k] = run;
  }
  for (std::size_t k = 0; k < n; ++k) {
    peak = std::max(peak, cum[k]);
    mdd = std::min(mdd, cum[k] - peak);
  }

  auto sorted = r;
  std::sort(sorted.begin(), sorted.end());
  // 5% of 24 months is 1.2 -> second smallest
  const std::size_t rank = static_cast<std::size_t>(std::ceil(0.05L * n));

  long double mb = 0;
  for (double x : b) mb += x;
  mb /= n;
  long double cov = 0, vb = 0;
  for (std::size_t k = 0; k < n; ++k) {
    cov += (r[k] - m) * (b[k] - mb);
    vb += (b[k] - mb) * (b[k] - mb);
  }
  const long double beta = cov / vb;

  long double down = 0;
  for (double x : r) {
    const long double d = x - 0.02L / 12;
    if (d < 0) down += d * d;
  }
  const long double dd = std::sqrt(down / n);

  Oracle o;
  o.mean = static_cast<double>(12 * m);
  o.vol = static_cast<double>(std::sqrt(12.0L) * sd);
  o.mdd = static_cast<double>(mdd);
  o.var5 = sorted[rank - 1];
  o.beta = static_cast<double>(beta);
  o.alpha = static_cast<double>(m - beta * mb);
  o.sharpe = static_cast<double>((12 * m - 0.02L) / (std::sqrt(12.0L) * sd));
  o.sortino = static_cast<double>((12 * m - 0.02L) / (std::sqrt(12.0L) * dd));
  return o;
}

// Daily P&L spread over calendar months so that the month sums equal `monthly`.
DailyPnl spread(const std::vector<double>& monthly, Date start) {
  DailyPnl d;
  std::size_t m = 0;
  Date day = start;
  int key = day.month_key();
  std::vector<std::size_t> first;
  while (m < monthly.size()) {
    if (day.is_weekday()) {
      if (day.month_key() != key) {
        key = day.month_key();
        ++m;
        if (m == monthly.size()) break;
      }
      if (first.size() <= m) first.push_back(d.dates.size());
      d.dates.push_back(day);
      d.pnl.push_back(0.0);
    }
    day = day.plus_days(1);
  }
  for (std::size_t k = 0; k < monthly.size(); ++k) d.pnl[first[k]] = monthly[k];
  return d;
}

}  // namespace

TEST_SUITE("performance") {

TEST_CASE("monthly sums") {
  DailyPnl d;
  d.dates = {Date(2020, 1, 30), Date(2020, 1, 31), Date(2020, 2, 3), Date(2020, 3, 2)};
  d.pnl = {0.01, -0.003, 0.02, 0.005};
  const auto m = monthly_returns(d);
  REQUIRE(m.size() == 3);
  CHECK(m.returns[0] == Approx(0.007).epsilon(1e-15));
  CHECK(m.returns[1] == 0.02);
  CHECK(m.months[2] == Date(2020, 3, 1).month_key());
}

TEST_CASE("drawdown, VaR and holding period") {
  CHECK(max_drawdown(std::vector{0.05, -0.10, 0.03}) == Approx(-0.10).epsilon(1e-15));
  CHECK(max_drawdown(std::vector{0.01, 0.02}) == 0.0);
  CHECK(max_drawdown(std::vector{-0.03, -0.02, 0.04}) == Approx(-0.05).epsilon(1e-15));
  std::vector<double> r(20);
  for (std::size_t k = 0; k < 20; ++k) r[k] = static_cast<double>(k) / 100.0;
  CHECK(value_at_risk(r) == 0.0);
  r.push_back(-1.0);
  CHECK(value_at_risk(r) == 0.0);  // ceil(1.05) = 2: second smallest
  r.push_back(-2.0);
  CHECK(value_at_risk(r) == -1.0);
  CHECK(holding_period(std::vector{0, 1, 1, 1, 0, -1, -1, 1}) == Approx(6.0 / 3.0));
  CHECK(holding_period(std::vector{0, 0}) == 0.0);
  CHECK(holding_period(std::vector{1, -1, 1, -1}) == 1.0);
}

TEST_CASE("24-month report against the oracle") {
  testsupport::Gen g(24);
  std::vector<double> strat(24), bench(24);
  for (std::size_t k = 0; k < 24; ++k) {
    bench[k] = 0.01 + 0.04 * g.normal();
    strat[k] = 0.002 + 0.6 * bench[k] + 0.02 * g.normal();
  }
  const auto pnl = spread(strat, Date(2018, 1, 1));
  const auto bpnl = spread(bench, Date(2018, 1, 1));
  PositionSeries pos{"s", pnl.dates, std::vector<int>(pnl.dates.size(), 0)};
  for (std::size_t k = 0; k < pos.position.size(); ++k) pos.position[k] = (k / 7) % 3 == 0 ? 0 : ((k / 7) % 3 == 1 ? 1 : -1);
  const auto rep = performance_report(pnl, pos, monthly_returns(bpnl));
  const auto o = oracle(strat, bench);
  REQUIRE(rep.monthly.size() == 24);
  for (std::size_t k = 0; k < 24; ++k) CHECK(std::abs(rep.monthly.returns[k] - strat[k]) < 1e-12);
  CHECK(std::abs(rep.mean_return - o.mean) < 1e-12);
  CHECK(std::abs(rep.volatility - o.vol) < 1e-12);
  CHECK(std::abs(rep.max_drawdown - o.mdd) < 1e-12);
  CHECK(std::abs(rep.var_5 - o.var5) < 1e-12);
  CHECK(std::abs(rep.alpha - o.alpha) < 1e-12);
  CHECK(std::abs(rep.beta - o.beta) < 1e-12);
  CHECK(std::abs(rep.sharpe_ratio - o.sharpe) < 1e-12);
  CHECK(std::abs(rep.sortino_ratio - o.sortino) < 1e-12);
  double gross = 0;
  for (int p : pos.position) gross += std::abs(p);
  CHECK(std::abs(rep.gross_exposure - gross / pos.position.size()) < 1e-12);
  CHECK(rep.holding_period == Approx(7.0).epsilon(0.3));
}

TEST_CASE("alternating months") {
  std::vector<double> r;
  for (int k = 0; k < 24; ++k) r.push_back(k % 2 == 0 ? 0.02 : 0.0);
  MonthlyReturns m;
  for (int k = 0; k < 24; ++k) m.months.push_back(24000 + k);
  m.returns = r;
  const auto rep = performance_from_monthly(m, {});
  CHECK(rep.mean_return == Approx(0.12).epsilon(1e-14));
  const double sd = std::sqrt(24 * 0.0001 / 23.0);
  CHECK(rep.volatility == Approx(std::sqrt(12.0) * sd).epsilon(1e-13));
  CHECK(rep.sharpe_ratio == Approx(0.10 / rep.volatility).epsilon(1e-13));
  CHECK(std::isnan(rep.alpha));
  CHECK(std::isnan(rep.beta));
  CHECK(rep.gross_exposure == 0.0);

  // identical to the benchmark: alpha 0, beta 1
  const auto self = performance_from_monthly(m, {}, m);
  CHECK(self.beta == Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(self.alpha) < 1e-15);
}

TEST_CASE("degenerate inputs") {
  MonthlyReturns m;
  for (int k = 0; k < 11; ++k) {
    m.months.push_back(k);
    m.returns.push_back(0.01);
  }
  CHECK_THROWS_AS(performance_from_monthly(m, {}), DataError);
  m.months.push_back(11);
  m.returns.push_back(0.01);
  const auto flat = performance_from_monthly(m, {});
  CHECK(std::isnan(flat.sharpe_ratio));
  CHECK(std::isnan(flat.sortino_ratio));  // every month beats the 2%/12 target: no downside
  auto zero = m;
  std::fill(zero.returns.begin(), zero.returns.end(), 0.0);
  const auto idle = performance_from_monthly(zero, {});
  CHECK(idle.mean_return == 0.0);
  CHECK(idle.volatility == 0.0);
  CHECK(idle.max_drawdown == 0.0);
  CHECK(std::isnan(idle.sharpe_ratio));
  CHECK(idle.sortino_ratio == Approx(-0.02 / (std::sqrt(12.0) * 0.02 / 12)).epsilon(1e-14));
  CHECK_THROWS_AS(performance_from_monthly(m, {}, zero), DataError);
  auto shifted = m;
  shifted.months[0] = -1;
  CHECK_THROWS_AS(performance_from_monthly(m, {}, shifted), DataError);
}

TEST_CASE("correlation matrix") {
  testsupport::Gen g(144);
  std::vector<double> a(144), b(144);
  for (auto& v : a) v = g.normal();
  for (auto& v : b) v = g.normal();
  std::vector<double> neg(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) neg[k] = -a[k];
  const auto c = correlation_matrix({a, b, neg});
  CHECK(c[0][0] == 100.0);
  CHECK(c[1][1] == 100.0);
  CHECK(c[0][2] == Approx(-100.0).epsilon(1e-12));
  CHECK(std::abs(c[0][1]) < 20.0);
  CHECK(c[0][1] == c[1][0]);
  CHECK_THROWS_AS(correlation_matrix({a, std::vector<double>(144, 1.0)}), DataError);
  CHECK_THROWS_AS(correlation_matrix({a, std::vector<double>(10, 1.0)}), DataError);
}

}  // TEST_SUITE
