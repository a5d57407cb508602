#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hetmarket/errors.hpp"
#include "hetmarket/oscillator.hpp"
#include "hetmarket/strategy.hpp"
#include "support.hpp"

using namespace hetmarket;
using doctest::Approx;

namespace {

PriceSeries from_closes(const std::vector<double>& close) {
  PriceSeries p;
  p.dates = business_days(Date(2012, 1, 2), close.size());
  p.close = close;
  p.open = close;
  return p;
}

EquilibriumPoint stable_ordered(const ModelParams& p) {
  const auto eq = find_equilibria(p);
  for (const auto& e : eq) {
    const bool same = std::all_of(e.s.begin(), e.s.end(), [&](double v) { return v == e.s[0]; });
    if (e.stability == Stability::stable && same && e.s[0] > 0.0) return e;
  }
  FAIL("no stable ordered equilibrium");
  return {};
}

}  // namespace

TEST_SUITE("strategy") {

TEST_CASE("signals and combinations") {
  CHECK(signal_from_forecast(0.0, 0.0) == 0);
  CHECK(signal_from_forecast(0.004, 0.001) == 1);
  CHECK(signal_from_forecast(-0.004, 0.001) == -1);
  CHECK(signal_from_forecast(0.0005, 0.001) == 0);
  CHECK(signal_from_forecast(1e-300, 0.0) == 1);
  CHECK_THROWS_AS(signal_from_forecast(0.1, -1.0), ConfigError);
  CHECK(combine_forecasts(std::vector{0.7}) == 0.7);
  CHECK(combine_forecasts(std::vector{0.3, -0.3}) == 0.0);
  CHECK(combine_forecasts(std::vector{0.01, 0.02, 0.03}) == Approx(0.02).epsilon(1e-15));
  CHECK_THROWS_AS(combine_forecasts(std::vector<double>{}), ConfigError);

  testsupport::Gen g(6);
  for (int k = 0; k < 1000; ++k) {
    const double x = g.normal() * 0.01;
    const double c = std::exp(g.uniform(-10, 10));
    CHECK(signal_from_forecast(c * x, 0.0) == signal_from_forecast(x, 0.0));
  }
}

TEST_CASE("default strategy set") {
  const auto s = default_strategies();
  REQUIRE(s.size() == 4);
  CHECK(s[0].horizons == std::vector<double>{1});
  CHECK(s[1].horizons == std::vector<double>{1, 2, 3, 4});
  CHECK(s[2].horizons.size() == 9);
  CHECK(s[3].horizons == std::vector<double>{28});
  for (const auto& c : s) CHECK(c.dead_band == 0.0);
  ForecastConfig bad{"x", {}, 0.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.horizons = {0.5};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.horizons = {2};
  bad.dead_band = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("forecast from fixed points") {
  auto p = presets::two_group();
  const auto eq = stable_ordered(p);
  const double s_eq = eq.s[0];
  MarketState st{0.0, eq.h, eq.s, 4.2};

  p.s_star = s_eq;
  for (double H : {1.0, 5.0, 28.0}) CHECK(std::abs(forecast(st, H, p)) < 1e-12);

  p.s_star = 0.153;
  for (double H : {1.0, 10.0, 45.0}) {
    CHECK(forecast(st, H, p) == Approx(H * p.a2 * (s_eq - p.s_star)).epsilon(1e-9));
  }
  // from a nearby state the increments settle on the same slope
  MarketState near = st;
  near.s[0] -= 0.05;
  near.h += 0.02;
  const double late = forecast(near, 300.0, p) - forecast(near, 290.0, p);
  CHECK(late == Approx(10.0 * p.a2 * (s_eq - p.s_star)).epsilon(1e-6));
}

TEST_CASE("forecast rises with the information level over short horizons") {
  const auto p = presets::nine_group();
  testsupport::Gen g(31);
  Forecaster f(p);
  for (int trial = 0; trial < 50; ++trial) {
    MarketState st{0.0, g.uniform(-0.9, 0.8), {}, 0.0};
    for (int i = 0; i < 9; ++i) st.s.push_back(g.uniform(-0.9, 0.9));
    const double base = f(st, 1.0);
    st.h += 0.05;
    CHECK(f(st, 1.0) >= base);
  }
}

TEST_CASE("forecast path matches single-horizon forecasts") {
  const auto p = presets::nine_group();
  Forecaster f(p);
  MarketState st{0.0, 0.3, std::vector<double>(9, -0.2), 0.0};
  std::vector<double> changes;
  f.path(st, 28, changes);
  REQUIRE(changes.size() == 28);
  for (int H : {1, 4, 11, 28}) CHECK(changes[H - 1] == Approx(f(st, H)).epsilon(1e-12));
  CHECK(f.substeps_per_day() == 4);
  // a finer step changes the forecast only slightly
  Forecaster fine(p, 40);
  CHECK(fine(st, 28.0) == Approx(f(st, 28.0)).epsilon(1e-4));
  CHECK_THROWS_AS(f(st, 0.5), ConfigError);
  MarketState wrong{0.0, 0.0, {0.1}, 0.0};
  CHECK_THROWS_AS(f(wrong, 1.0), ConfigError);
  CHECK_THROWS_AS(Forecaster(p, 0), ConfigError);
}

TEST_CASE("momentum-reversal benchmark") {
  std::vector<double> rising(300);
  for (std::size_t k = 0; k < rising.size(); ++k) rising[k] = 100.0 * std::pow(1.001, static_cast<double>(k));
  CHECK(momrev_signal(from_closes(rising), 260) == 0);

  CHECK(momrev_signal(from_closes(std::vector<double>(300, 50.0)), 299) == 0);

  auto dip = rising;
  for (std::size_t k = 295; k < 300; ++k) dip[k] = dip[294] * (1.0 - 0.002 * static_cast<double>(k - 294));
  CHECK(momrev_signal(from_closes(dip), 299) == 1);

  std::vector<double> falling(300);
  for (std::size_t k = 0; k < falling.size(); ++k) falling[k] = 100.0 * std::pow(0.999, static_cast<double>(k));
  auto bounce = falling;
  for (std::size_t k = 295; k < 300; ++k) bounce[k] = bounce[294] * (1.0 + 0.002 * static_cast<double>(k - 294));
  CHECK(momrev_signal(from_closes(bounce), 299) == -1);

  CHECK_THROWS_AS(momrev_signal(from_closes(rising), 249), DataError);
  CHECK_NOTHROW(momrev_signal(from_closes(rising), 250));
  CHECK_THROWS_AS(momrev_signal(from_closes(rising), 300), DataError);

  const auto pos = momrev_positions(from_closes(dip));
  CHECK(pos.name == "mom_rev");
  for (std::size_t k = 0; k < 250; ++k) CHECK(pos.position[k] == 0);
  CHECK(pos.position[299] == 1);
}

TEST_CASE("next-open execution") {
  const auto prices = [] {
    PriceSeries p;
    p.dates = business_days(Date(2020, 6, 1), 6);
    p.open = {100, 101, 103, 99, 104, 104};
    p.close = {100.5, 102, 101, 100, 104, 105};
    return p;
  }();
  PositionSeries flat{"flat", prices.dates, std::vector<int>(6, 0)};
  for (double v : backtest(flat, prices).pnl) CHECK(v == 0.0);

  // one-day long decided at the close of day 1: bought at open 2, sold at open 3
  PositionSeries one{"one", prices.dates, {0, 1, 0, 0, 0, 0}};
  const auto pnl = backtest(one, prices);
  for (std::size_t k = 0; k < 6; ++k) {
    if (k == 3) CHECK(pnl.pnl[k] == Approx(99.0 / 103.0 - 1.0).epsilon(1e-15));
    else CHECK(pnl.pnl[k] == 0.0);
  }

  PriceSeries up;
  up.dates = business_days(Date(2020, 1, 1), 40);
  for (std::size_t k = 0; k < 40; ++k) {
    up.open.push_back(50.0 * std::pow(1.01, static_cast<double>(k)));
    up.close.push_back(up.open.back());
  }
  const auto bh = backtest(buy_and_hold(up.dates), up);
  CHECK(bh.pnl[0] == 0.0);
  CHECK(bh.pnl[1] == 0.0);
  for (std::size_t k = 2; k < 40; ++k) CHECK(bh.pnl[k] == Approx(0.01).epsilon(1e-12));

  PositionSeries misaligned{"m", business_days(Date(2020, 6, 2), 6), std::vector<int>(6, 1)};
  CHECK_THROWS_AS(backtest(misaligned, prices), DataError);
  PositionSeries big{"b", prices.dates, {2, 0, 0, 0, 0, 0}};
  CHECK_THROWS_AS(backtest(big, prices), DataError);
}

TEST_CASE("no look-ahead") {
  testsupport::Gen g(77);
  std::vector<double> close(600);
  double level = 100;
  for (auto& c : close) {
    level *= std::exp(0.01 * g.normal());
    c = level;
  }
  const auto base = from_closes(close);
  PriceSeries prices = base;
  prices.open[0] = prices.close[0];
  for (std::size_t k = 1; k < prices.size(); ++k) prices.open[k] = prices.close[k - 1] * 1.001;

  const auto pos0 = momrev_positions(prices);
  const auto pnl0 = backtest(pos0, prices);
  for (std::size_t t : {300, 420, 555}) {
    auto tampered = prices;
    for (std::size_t k = t + 1; k < tampered.size(); ++k) {
      tampered.close[k] *= 1.5;
      tampered.open[k] *= 0.7;
    }
    const auto pos1 = momrev_positions(tampered);
    const auto pnl1 = backtest(pos1, tampered);
    for (std::size_t k = 0; k <= t; ++k) {
      CHECK(pos1.position[k] == pos0.position[k]);
      CHECK(pnl1.pnl[k] == pnl0.pnl[k]);
    }
  }

  // model positions: altering later states leaves earlier signals alone
  const auto p = presets::nine_group();
  StatePath path;
  path.dates = business_days(Date(2015, 1, 1), 60);
  for (std::size_t k = 0; k < 60; ++k) {
    MarketState st{0.0, g.uniform(-0.5, 0.5), {}, 0.0};
    for (int i = 0; i < 9; ++i) st.s.push_back(g.uniform(-0.7, 0.7));
    path.states.push_back(st);
  }
  const auto cfgs = default_strategies();
  const auto a = model_positions(path, p, cfgs);
  auto later = path;
  for (std::size_t k = 40; k < 60; ++k) later.states[k].h = -later.states[k].h;
  const auto b = model_positions(later, p, cfgs);
  for (std::size_t c = 0; c < cfgs.size(); ++c) {
    for (std::size_t k = 0; k < 40; ++k) CHECK(a[c].position[k] == b[c].position[k]);
  }
}

TEST_CASE("model positions agree with direct forecasts") {
  const auto p = presets::nine_group();
  testsupport::Gen g(12);
  StatePath path;
  path.dates = business_days(Date(2015, 1, 1), 25);
  for (std::size_t k = 0; k < 25; ++k) {
    MarketState st{0.0, g.uniform(-0.5, 0.5), {}, 0.0};
    for (int i = 0; i < 9; ++i) st.s.push_back(g.uniform(-0.7, 0.7));
    path.states.push_back(st);
  }
  const auto cfgs = default_strategies();
  const auto pos = model_positions(path, p, cfgs);
  Forecaster f(p);
  for (std::size_t k = 0; k < 25; ++k) {
    for (std::size_t c = 0; c < cfgs.size(); ++c) {
      std::vector<double> dps;
      for (double H : cfgs[c].horizons) dps.push_back(f(path.states[k], H));
      const double mean = combine_forecasts(dps);
      if (std::abs(mean) > 1e-12) CHECK(pos[c].position[k] == signal_from_forecast(mean, 0.0));
    }
  }
  std::vector<ForecastConfig> half{{"h", {1.5}, 0.0}};
  CHECK_THROWS_AS(model_positions(path, p, half), ConfigError);
  CHECK_THROWS_AS(model_positions(path, p, std::vector<ForecastConfig>{}), ConfigError);
}

TEST_CASE("synthetic market from a daily trajectory") {
  SimulationConfig cfg;
  cfg.params = presets::nine_group();
  cfg.initial = {0.0, 0.0, std::vector<double>(9, 0.5), 4.0};
  cfg.horizon = 30;
  cfg.noise = NoiseSpec{};
  const auto traj = simulate(cfg);
  const auto m = synthetic_market(traj, Date(2000, 1, 1));
  REQUIRE(m.prices.size() == 31);
  CHECK(m.prices.dates.front() == Date(2000, 1, 3));
  CHECK(m.prices.open[0] == m.prices.close[0]);
  for (std::size_t k = 1; k < 31; ++k) {
    CHECK(m.prices.open[k] == m.prices.close[k - 1]);
    CHECK(m.prices.close[k] == Approx(std::exp(traj.states[k].p)).epsilon(1e-15));
    CHECK(m.info.h[k] == traj.states[k].h);
  }
  cfg.output_stride = 2.0;
  CHECK_THROWS_AS(synthetic_market(simulate(cfg), Date(2000, 1, 1)), ConfigError);
}

}  // TEST_SUITE
