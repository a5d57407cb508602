#include "hetmarket/performance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hetmarket/calibration.hpp"
#include "hetmarket/errors.hpp"

namespace hetmarket {

MonthlyReturns monthly_returns(const DailyPnl& pnl) {
  if (pnl.dates.size() != pnl.pnl.size()) throw DataError("monthly returns: length mismatch");
  MonthlyReturns out;
  for (std::size_t k = 0; k < pnl.dates.size(); ++k) {
    const int key = pnl.dates[k].month_key();
    if (out.months.empty() || out.months.back() != key) {
      if (!out.months.empty() && key < out.months.back()) {
        throw DataError("monthly returns: dates out of order");
      }
      out.months.push_back(key);
      out.returns.push_back(0.0);
    }
    out.returns.back() += pnl.pnl[k];
  }
  return out;
}

double max_drawdown(std::span<const double> monthly) {
  double level = 0.0;
  double peak = 0.0;
  double worst = 0.0;
  for (double r : monthly) {
    level += r;
    peak = std::max(peak, level);
    worst = std::min(worst, level - peak);
  }
  return worst;
}

double value_at_risk(std::span<const double> monthly, double level) {
  if (monthly.empty()) throw DataError("VaR: empty series");
  std::vector<double> sorted(monthly.begin(), monthly.end());
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(sorted.size()) - 1e-12));
  return sorted[std::max<std::size_t>(rank, 1) - 1];
}

double holding_period(std::span<const int> positions) {
  std::size_t runs = 0;
  std::size_t days = 0;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if (positions[k] == 0) continue;
    ++days;
    if (k == 0 || positions[k - 1] != positions[k]) ++runs;
  }
  return runs == 0 ? 0.0 : static_cast<double>(days) / static_cast<double>(runs);
}

PerformanceReport performance_from_monthly(const MonthlyReturns& monthly,
                                           std::span<const int> positions,
                                           const std::optional<MonthlyReturns>& benchmark) {
  const std::size_t n = monthly.size();
  if (n < 12) throw DataError("performance report: needs at least 12 months, got " + std::to_string(n));
  const auto& r = monthly.returns;
  const double dn = static_cast<double>(n);

  PerformanceReport rep;
  rep.monthly = monthly;
  const double mean = std::accumulate(r.begin(), r.end(), 0.0) / dn;
  double ss = 0.0;
  for (double x : r) ss += (x - mean) * (x - mean);
  // a constant series has exactly zero spread; the summed rounding noise would not
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  const double sd = *lo == *hi ? 0.0 : std::sqrt(ss / (dn - 1.0));
  rep.mean_return = 12.0 * mean;
  rep.volatility = std::sqrt(12.0) * sd;
  rep.max_drawdown = max_drawdown(r);
  rep.var_5 = value_at_risk(r);

  const double excess = rep.mean_return - kRiskFreeRate;
  rep.sharpe_ratio = rep.volatility > 0.0 ? excess / rep.volatility
                                          : std::numeric_limits<double>::quiet_NaN();
  const double target = kRiskFreeRate / 12.0;
  double down = 0.0;
  for (double x : r) {
    const double d = std::min(0.0, x - target);
    down += d * d;
  }
  const double downside = std::sqrt(down / dn);
  rep.sortino_ratio = downside > 0.0 ? excess / (std::sqrt(12.0) * downside)
                                     : std::numeric_limits<double>::quiet_NaN();

  if (!positions.empty()) {
    double gross = 0.0;
    for (int p : positions) gross += std::abs(p);
    rep.gross_exposure = gross / static_cast<double>(positions.size());
  }
  rep.holding_period = holding_period(positions);

  if (benchmark) {
    if (benchmark->months != monthly.months) {
      throw DataError("performance report: benchmark months differ from strategy months");
    }
    const auto& b = benchmark->returns;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / dn;
    double sbb = 0.0, sbr = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      sbb += (b[k] - mb) * (b[k] - mb);
      sbr += (b[k] - mb) * (r[k] - mean);
    }
    if (!(sbb > 0.0)) throw DataError("performance report: benchmark has zero variance");
    rep.beta = sbr / sbb;
    rep.alpha = mean - rep.beta * mb;
  } else {
    rep.alpha = std::numeric_limits<double>::quiet_NaN();
    rep.beta = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

PerformanceReport performance_report(const DailyPnl& pnl, const PositionSeries& positions,
                                     const std::optional<MonthlyReturns>& benchmark) {
  if (positions.dates != pnl.dates) throw DataError("performance report: positions and P&L dates differ");
  return performance_from_monthly(monthly_returns(pnl), positions.position, benchmark);
}

std::vector<std::vector<double>> correlation_matrix(
    const std::vector<std::vector<double>>& series) {
  const std::size_t m = series.size();
  for (const auto& s : series) {
    if (s.size() != series.front().size()) throw DataError("correlation matrix: unequal lengths");
  }
  std::vector<std::vector<double>> out(m, std::vector<double>(m, 100.0));
  for (std::size_t a = 0; a < m; ++a) {
    (void)pearson(series[a], series[a]);  // flags zero variance
    for (std::size_t b = a + 1; b < m; ++b) {
      const double c = 100.0 * pearson(series[a], series[b]);
      out[a][b] = c;
      out[b][a] = c;
    }
  }
  return out;
}

}  // namespace hetmarket
