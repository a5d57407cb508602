#pragma once

// News-driven trading strategies: model forecasts, signals, the Mom-Rev
// benchmark and next-open execution.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetmarket/model.hpp"
#include "hetmarket/series.hpp"
#include "hetmarket/simulation.hpp"

namespace hetmarket {

/// A forecast-driven strategy: the mean of the forecasts over `horizons`
/// (business days) compared against the dead-band.
struct ForecastConfig {
  std::string name;
  std::vector<double> horizons;
  double dead_band = 0.0;

  void validate() const;
};

/// strategy_1 .. strategy_4: shortest horizon, the four shortest, all nine,
/// longest.
std::vector<ForecastConfig> default_strategies();

/// Integrates the noise-free reduced system forward from a state and
/// reports p(t + H) - p(t).
class Forecaster {
 public:
  /// The default step divides a day into ceil(4 / min(tau_i, tau_h)) pieces.
  explicit Forecaster(const ModelParams& params, std::optional<int> substeps_per_day = {});

  double operator()(const MarketState& state, double horizon);

  /// changes[d - 1] = expected change after d days, d = 1 .. days.
  void path(const MarketState& state, int days, std::vector<double>& changes);

  int substeps_per_day() const noexcept { return substeps_; }

 private:
  void load(const MarketState& state);

  ModelParams params_;
  Rk4Stepper stepper_;
  int substeps_;
  std::vector<double> y_;
};

double forecast(const MarketState& state, double horizon, const ModelParams& params);

/// +1 above the dead-band, -1 below its negative, 0 otherwise.
int signal_from_forecast(double change, double dead_band);

/// Arithmetic mean; throws ConfigError on an empty list.
double combine_forecasts(std::span<const double> changes);

/// Sign of the mean of a 5-day reversal and a 250-day momentum vote at
/// index t of the price series. Throws DataError with fewer than 250 prior
/// closes.
int momrev_signal(const PriceSeries& prices, std::size_t t);

inline constexpr std::size_t kMomentumLookback = 250;
inline constexpr std::size_t kReversalLookback = 5;

/// Decision taken at the close of each date; it trades at the next open.
struct PositionSeries {
  std::string name;
  std::vector<Date> dates;
  std::vector<int> position;

  std::size_t size() const noexcept { return dates.size(); }
};

/// Model states at each date; only h and s are used.
struct StatePath {
  std::vector<Date> dates;
  std::vector<MarketState> states;
};

/// Daily positions for every config, sharing one forecast integration per day.
std::vector<PositionSeries> model_positions(const StatePath& path, const ModelParams& params,
                                            std::span<const ForecastConfig> configs,
                                            std::optional<int> substeps_per_day = {});

/// Mom-Rev positions; zero while the momentum lookback is unavailable.
PositionSeries momrev_positions(const PriceSeries& prices);

PositionSeries buy_and_hold(const std::vector<Date>& dates);

struct DailyPnl {
  std::vector<Date> dates;
  std::vector<double> pnl;  ///< fraction of the fixed capital
};

/// pnl[k] = position[k - 2] * (open[k] / open[k - 1] - 1): the decision of
/// day k-2 is bought at the open of k-1 and marked at the open of k. The
/// first two days carry zero. Dates must match exactly.
DailyPnl backtest(const PositionSeries& positions, const PriceSeries& prices);

/// A simulated market laid on a business-day calendar: close_k = exp(p_k),
/// open_k = close_{k-1} (open_0 = close_0). Needs a daily trajectory.
struct SyntheticMarket {
  InformationSeries info;
  PriceSeries prices;
  StatePath states;
};
SyntheticMarket synthetic_market(const Trajectory& trajectory, Date first);

}  // namespace hetmarket
