#include "hetmarket/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetmarket/errors.hpp"

namespace hetmarket {

void ForecastConfig::validate() const {
  if (horizons.empty()) throw ConfigError("strategy '" + name + "': no forecast horizons");
  for (double h : horizons) {
    if (!(h >= 1.0) || !std::isfinite(h)) {
      throw ConfigError("strategy '" + name + "': horizons must be >= 1 business day");
    }
  }
  if (!(dead_band >= 0.0)) throw ConfigError("strategy '" + name + "': dead_band must be >= 0");
}

std::vector<ForecastConfig> default_strategies() {
  const std::vector<double> all(std::begin(kNineGroupHorizons), std::end(kNineGroupHorizons));
  return {
      {"strategy_1", {all.front()}, 0.0},
      {"strategy_2", {all.begin(), all.begin() + 4}, 0.0},
      {"strategy_3", all, 0.0},
      {"strategy_4", {all.back()}, 0.0},
  };
}

namespace {

const ModelParams& checked(const ModelParams& params) {
  params.validate();
  return params;
}

int forecast_substeps(const ModelParams& params, std::optional<int> requested) {
  if (requested) {
    if (*requested < 1) throw ConfigError("forecast: substeps_per_day must be >= 1");
    return *requested;
  }
  const double fastest =
      std::min(params.tau_h, *std::min_element(params.tau.begin(), params.tau.end()));
  return static_cast<int>(std::ceil(4.0 / fastest - 1e-9));
}

}  // namespace

Forecaster::Forecaster(const ModelParams& params, std::optional<int> substeps_per_day)
    : params_(params),
      stepper_(checked(params), SystemKind::reduced),
      substeps_(forecast_substeps(params, substeps_per_day)),
      y_(state_size(params.groups())) {}

void Forecaster::load(const MarketState& state) {
  if (state.s.size() != params_.groups()) {
    throw ConfigError("forecast: state has the wrong number of groups");
  }
  if (!(std::abs(state.h) <= 1.0)) throw ConfigError("forecast: |h| exceeds 1");
  y_[kInfoIndex] = state.h;
  for (std::size_t i = 0; i < state.s.size(); ++i) {
    if (!(std::abs(state.s[i]) <= 1.0)) throw ConfigError("forecast: |s_i| exceeds 1");
    y_[i + 1] = state.s[i];
  }
  y_[price_index(params_.groups())] = 0.0;
}

double Forecaster::operator()(const MarketState& state, double horizon) {
  if (!(horizon >= 1.0) || !std::isfinite(horizon)) {
    throw ConfigError("forecast: horizon must be >= 1");
  }
  load(state);
  const long long steps = std::llround(horizon * substeps_);
  const double dt = horizon / static_cast<double>(steps);
  for (long long k = 0; k < steps; ++k) stepper_.advance(y_, 0.0, dt);
  return y_[price_index(params_.groups())];
}

void Forecaster::path(const MarketState& state, int days, std::vector<double>& changes) {
  if (days < 1) throw ConfigError("forecast: path needs at least one day");
  load(state);
  changes.resize(static_cast<std::size_t>(days));
  const double dt = 1.0 / substeps_;
  for (int d = 0; d < days; ++d) {
    for (int k = 0; k < substeps_; ++k) stepper_.advance(y_, 0.0, dt);
    changes[static_cast<std::size_t>(d)] = y_[price_index(params_.groups())];
  }
}

double forecast(const MarketState& state, double horizon, const ModelParams& params) {
  Forecaster f(params);
  return f(state, horizon);
}

int signal_from_forecast(double change, double dead_band) {
  if (!(dead_band >= 0.0)) throw ConfigError("signal: dead_band must be >= 0");
  if (change > dead_band) return 1;
  if (change < -dead_band) return -1;
  return 0;
}

double combine_forecasts(std::span<const double> changes) {
  if (changes.empty()) throw ConfigError("combine_forecasts: empty forecast list");
  return std::accumulate(changes.begin(), changes.end(), 0.0) /
         static_cast<double>(changes.size());
}

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

int momrev_signal(const PriceSeries& prices, std::size_t t) {
  if (t >= prices.size()) throw DataError("momrev: index past the end of the price series");
  if (t < kMomentumLookback) {
    throw DataError("momrev: needs " + std::to_string(kMomentumLookback) + " prior closes");
  }
  const double c = prices.close[t];
  const int reversal = -sign_of(c / prices.close[t - kReversalLookback] - 1.0);
  const int momentum = sign_of(c / prices.close[t - kMomentumLookback] - 1.0);
  return sign_of(static_cast<double>(reversal + momentum));
}

std::vector<PositionSeries> model_positions(const StatePath& path, const ModelParams& params,
                                            std::span<const ForecastConfig> configs,
                                            std::optional<int> substeps_per_day) {
  if (path.dates.size() != path.states.size()) {
    throw DataError("model_positions: dates and states differ in length");
  }
  if (configs.empty()) throw ConfigError("model_positions: no strategies configured");
  double longest = 0.0;
  for (const auto& cfg : configs) {
    cfg.validate();
    for (double h : cfg.horizons) {
      if (h != std::floor(h)) throw ConfigError("strategy '" + cfg.name + "': horizons must be whole days");
      longest = std::max(longest, h);
    }
  }

  std::vector<PositionSeries> out(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    out[c].name = configs[c].name;
    out[c].dates = path.dates;
    out[c].position.resize(path.dates.size());
  }

  Forecaster forecaster(params, substeps_per_day);
  std::vector<double> changes;
  std::vector<double> picked;
  for (std::size_t k = 0; k < path.states.size(); ++k) {
    forecaster.path(path.states[k], static_cast<int>(longest), changes);
    for (std::size_t c = 0; c < configs.size(); ++c) {
      picked.clear();
      for (double h : configs[c].horizons) picked.push_back(changes[static_cast<std::size_t>(h) - 1]);
      out[c].position[k] = signal_from_forecast(combine_forecasts(picked), configs[c].dead_band);
    }
  }
  return out;
}

PositionSeries momrev_positions(const PriceSeries& prices) {
  PositionSeries out;
  out.name = "mom_rev";
  out.dates = prices.dates;
  out.position.assign(prices.size(), 0);
  for (std::size_t t = kMomentumLookback; t < prices.size(); ++t) {
    out.position[t] = momrev_signal(prices, t);
  }
  return out;
}

PositionSeries buy_and_hold(const std::vector<Date>& dates) {
  return {"buy_and_hold", dates, std::vector<int>(dates.size(), 1)};
}

DailyPnl backtest(const PositionSeries& positions, const PriceSeries& prices) {
  prices.validate();
  if (positions.dates != prices.dates || positions.position.size() != positions.dates.size()) {
    throw DataError("backtest: position and price dates are not aligned");
  }
  const std::size_t n = prices.size();
  DailyPnl out;
  out.dates = prices.dates;
  out.pnl.assign(n, 0.0);
  for (std::size_t k = 2; k < n; ++k) {
    const int pos = positions.position[k - 2];
    if (pos < -1 || pos > 1) throw DataError("backtest: positions must lie in {-1, 0, 1}");
    out.pnl[k] = pos * (prices.open[k] / prices.open[k - 1] - 1.0);
  }
  return out;
}

SyntheticMarket synthetic_market(const Trajectory& trajectory, Date first) {
  const auto& st = trajectory.states;
  if (st.size() < 2) throw DataError("synthetic market: trajectory too short");
  for (std::size_t k = 1; k < st.size(); ++k) {
    if (std::abs(st[k].t - st[k - 1].t - 1.0) > 1e-9) {
      throw ConfigError("synthetic market: trajectory must be sampled once per day");
    }
  }
  SyntheticMarket m;
  const auto dates = business_days(first, st.size());
  m.info.dates = dates;
  m.prices.dates = dates;
  m.states.dates = dates;
  m.states.states = st;
  for (std::size_t k = 0; k < st.size(); ++k) {
    m.info.h.push_back(st[k].h);
    const double close = std::exp(st[k].p);
    m.prices.open.push_back(k == 0 ? close : m.prices.close.back());
    m.prices.close.push_back(close);
  }
  return m;
}

}  // namespace hetmarket
