#include <doctest.h>

#include <cmath>

#include "hetmarket/errors.hpp"
#include "hetmarket/model.hpp"
#include "support.hpp"

using namespace hetmarket;
using doctest::Approx;

TEST_SUITE("model") {

TEST_CASE("aggregate sentiment") {
  CHECK(aggregate_sentiment(std::vector{0.3, 0.3, 0.3}, std::vector{1.0, 7.0, 20.0}) == Approx(0.3).epsilon(1e-15));
  CHECK(aggregate_sentiment(std::vector{0.5, 0.1}, std::vector{1.0, 15.0}) == Approx(0.125).epsilon(1e-15));
  CHECK(aggregate_sentiment(std::vector{0.42}, std::vector{3.0}) == 0.42);
  CHECK_THROWS_AS(aggregate_sentiment(std::vector{0.1, 0.2}, std::vector{1.0}), ConfigError);
  CHECK_THROWS_AS(aggregate_sentiment(std::vector{0.1, 0.2}, std::vector{1.0, 0.0}), ConfigError);
}

TEST_CASE("group sentiment rate") {
  ModelParams p;
  CHECK(sentiment_rhs(0.0, 0.0, 0, p) == 0.0);
  CHECK(sentiment_rhs(0.0, 0.5, 0, p) == Approx(std::tanh(0.5)).epsilon(1e-15));
  CHECK(std::tanh(0.5) == Approx(0.4621).epsilon(1e-4));
  const double s0 = testsupport::s0(1.1);
  CHECK(s0 == Approx(0.5030).epsilon(2e-3));
  CHECK(std::abs(sentiment_rhs(s0, 0.0, 0, p)) < 1e-12);
  CHECK(std::abs(sentiment_rhs(0.5030, 0.0, 0, p)) < 1e-3);
  CHECK_THROWS_AS(sentiment_rhs(0.0, 0.0, 1, p), ConfigError);
}

TEST_CASE("reduced information rate") {
  ModelParams p;
  p.delta = 0.02;
  CHECK(std::abs(information_rhs_reduced(std::tanh(0.02), 0.0, 0.0, p)) < 1e-16);
  CHECK(information_rhs_reduced(0.0, 0.0, 0.0, p) == Approx(0.0200).epsilon(1e-3));
  CHECK(information_rhs_reduced(0.0, 0.0, 0.0, p) == Approx(std::tanh(0.02)).epsilon(1e-15));
  p.kappa = 0.0;
  CHECK(information_rhs_reduced(0.1, 0.05, 3.0, p) == information_rhs_reduced(0.1, 0.05, -2.0, p));
}

TEST_CASE("full information rate") {
  ModelParams p;
  p.kappa1 = 2.0;
  CHECK(information_rhs_full(0.0, 0.0, 0.0, p) == 0.0);
  p.kappa1 = 0.0;
  p.kappa = 0.0;
  p.tau_h = 2.5;
  CHECK(information_rhs_full(0.4, 0.3, 1.0, p) == Approx(-0.4 / 2.5).epsilon(1e-15));
}

TEST_CASE("full and reduced feedback agree when the long-horizon term is a constant drift") {
  // kappa1 p' = gamma s' + kappa1 a2 (s - s*); with delta set to that constant the forms coincide.
  testsupport::Gen g(11);
  for (int trial = 0; trial < 200; ++trial) {
    ModelParams p;
    p.a1 = g.uniform(0.1, 1.0);
    p.a2 = g.uniform(0.0, 0.01);
    p.s_star = g.uniform(-0.5, 0.5);
    p.gamma = g.uniform(0.0, 20.0);
    p.kappa1 = p.gamma / p.a1;
    const double s = g.uniform(-1, 1), rate = g.uniform(-0.3, 0.3), h = g.uniform(-1, 1);
    const double xi = g.normal();
    const double drift = p.kappa1 * p.a2 * (s - p.s_star);
    ModelParams r = p;
    r.delta = drift;
    const double full = information_rhs_full(h, price_rhs(rate, s, p), xi, p);
    const double reduced = (-h + std::tanh(p.gamma * rate + drift + p.kappa * xi)) / p.tau_h;
    CHECK(full == Approx(reduced).epsilon(1e-12));
    if (drift >= 0.0) CHECK(full == Approx(information_rhs_reduced(h, rate, xi, r)).epsilon(1e-12));
  }
}

TEST_CASE("price rate") {
  ModelParams p;  // a1 = 0.356, a2 = 0.003, s* = 0.153
  CHECK(price_rhs(0.0, p.s_star, p) == 0.0);
  // 0.356 * 0.01 + 0.003 * (0.5 - 0.153)
  CHECK(price_rhs(0.01, 0.5, p) == Approx(0.004601).epsilon(1e-12));
  p.a1 = 0.0;
  CHECK(price_rhs(0.7, 0.5, p) == Approx(0.003 * (0.5 - 0.153)).epsilon(1e-15));
}

TEST_CASE("homogeneous reduction") {
  const auto nine = presets::nine_group();
  const auto one = homogeneous_params(nine);
  REQUIRE(one.groups() == 1);
  double num = 0, den = 0;
  for (double t : nine.tau) {
    num += t * t;
    den += t;
  }
  CHECK(one.tau[0] == Approx(num / den).epsilon(1e-14));
  CHECK(one.gamma == nine.gamma);
  CHECK(one.beta1 == nine.beta1);
  CHECK(one.delta == nine.delta);
  CHECK(homogeneous_params(nine, 7.0).tau[0] == 7.0);
  CHECK(aggregate_sentiment(std::vector{0.37}, one.tau) == 0.37);
  CHECK_THROWS_AS(homogeneous_params(nine, -1.0), ConfigError);
}

TEST_CASE("weights") {
  const auto p = presets::nine_group();
  double sum = 0;
  for (double w : p.weights()) sum += w;
  CHECK(std::abs(sum - 1.0) < 1e-12);
  CHECK(p.tau_sum() == 107.0);
  CHECK(p.gamma_bar() == Approx(10.0 / 107.0));
}

TEST_CASE("parameter validation") {
  auto bad = [](auto mutate) {
    ModelParams p;
    mutate(p);
    CHECK_THROWS_AS(p.validate(), ConfigError);
  };
  bad([](ModelParams& p) { p.tau.clear(); });
  bad([](ModelParams& p) { p.tau = {1.0, -2.0}; });
  bad([](ModelParams& p) { p.tau_h = 0.0; });
  bad([](ModelParams& p) { p.beta1 = 0.0; });
  bad([](ModelParams& p) { p.beta2 = -1.0; });
  bad([](ModelParams& p) { p.a1 = -0.1; });
  bad([](ModelParams& p) { p.a2 = -0.1; });
  bad([](ModelParams& p) { p.s_star = 1.5; });
  bad([](ModelParams& p) { p.delta = -0.01; });
  bad([](ModelParams& p) { p.gamma = NAN; });
  CHECK_NOTHROW(presets::nine_group().validate());
}

TEST_CASE("packed state layout") {
  MarketState st{2.0, 0.1, {0.2, 0.3, 0.4}, 5.0};
  const auto y = pack_state(st);
  REQUIRE(y.size() == state_size(3));
  CHECK(y[kInfoIndex] == 0.1);
  CHECK(y[price_index(3)] == 5.0);
  const auto back = unpack_state(y, 2.0);
  CHECK(back.s == st.s);
  CHECK(back.p == 5.0);
  CHECK(back.h == 0.1);
}

TEST_CASE("system rhs matches the component functions") {
  auto p = presets::two_group();
  const std::vector<double> y{0.2, -0.4, 0.6, 1.0};
  std::vector<double> dy(4);
  system_rhs(p, SystemKind::reduced, y, 0.3, dy);
  const double r1 = sentiment_rhs(-0.4, 0.2, 0, p), r2 = sentiment_rhs(0.6, 0.2, 1, p);
  const double rate = (1 * r1 + 15 * r2) / 16, level = (1 * -0.4 + 15 * 0.6) / 16;
  CHECK(dy[1] == r1);
  CHECK(dy[2] == r2);
  CHECK(dy[0] == Approx(information_rhs_reduced(0.2, rate, 0.3, p)).epsilon(1e-14));
  CHECK(dy[3] == Approx(price_rhs(rate, level, p)).epsilon(1e-14));
  p.kappa1 = 4.0;
  system_rhs(p, SystemKind::full, y, 0.3, dy);
  CHECK(dy[0] == Approx(information_rhs_full(0.2, price_rhs(rate, level, p), 0.3, p)).epsilon(1e-14));
}

TEST_CASE("clamped arctanh counts its clamps") {
  ClampCounter c;
  CHECK(clamped_atanh(0.5, c) == Approx(std::atanh(0.5)).epsilon(1e-15));
  CHECK(c.clamps == 0);
  CHECK(std::isfinite(clamped_atanh(1.0, c)));
  CHECK(std::isfinite(clamped_atanh(-3.0, c)));
  CHECK(c.clamps == 2);
}

}  // TEST_SUITE
