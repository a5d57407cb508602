#pragma once

// Monthly performance statistics of a backtested strategy.

#include <optional>
#include <span>
#include <vector>

#include "hetmarket/strategy.hpp"

namespace hetmarket {

inline constexpr double kRiskFreeRate = 0.02;  // per annum

/// Calendar-month sums of daily non-compounded returns.
struct MonthlyReturns {
  std::vector<int> months;  ///< Date::month_key of each month
  std::vector<double> returns;

  std::size_t size() const noexcept { return returns.size(); }
};

MonthlyReturns monthly_returns(const DailyPnl& pnl);

/// All return-like fields are fractions (0.12 = 12%). Alpha is the monthly
/// regression intercept; alpha and beta are NaN without a benchmark, Sharpe
/// is NaN at zero volatility.
struct PerformanceReport {
  double mean_return = 0.0;     ///< annualized, 12 x monthly mean
  double volatility = 0.0;      ///< annualized, sqrt(12) x sample std
  double max_drawdown = 0.0;    ///< <= 0, cumulative monthly path from 0
  double var_5 = 0.0;           ///< order statistic ceil(0.05 n)
  double gross_exposure = 0.0;  ///< mean |position|
  double alpha = 0.0;
  double beta = 0.0;
  double sharpe_ratio = 0.0;
  double sortino_ratio = 0.0;
  double holding_period = 0.0;  ///< mean length of runs of one nonzero position
  MonthlyReturns monthly;
};

/// Needs at least 12 months. The benchmark, when given, must cover the same
/// months.
PerformanceReport performance_report(const DailyPnl& pnl, const PositionSeries& positions,
                                     const std::optional<MonthlyReturns>& benchmark = {});

/// Statistics of a bare monthly return series; exposure and holding period
/// come from `positions` (may be empty).
PerformanceReport performance_from_monthly(const MonthlyReturns& monthly,
                                           std::span<const int> positions,
                                           const std::optional<MonthlyReturns>& benchmark = {});

double max_drawdown(std::span<const double> monthly);
double value_at_risk(std::span<const double> monthly, double level = 0.05);
double holding_period(std::span<const int> positions);

/// Pairwise Pearson correlations in percent. Throws DataError on unequal
/// lengths or a zero-variance series.
std::vector<std::vector<double>> correlation_matrix(
    const std::vector<std::vector<double>>& series);

}  // namespace hetmarket
