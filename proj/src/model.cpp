#include "hetmarket/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hetmarket/errors.hpp"

namespace hetmarket {

double ModelParams::tau_sum() const noexcept {
  return std::accumulate(tau.begin(), tau.end(), 0.0);
}

double ModelParams::gamma_bar() const noexcept { return gamma / tau_sum(); }

std::vector<double> ModelParams::weights() const {
  const double total = tau_sum();
  std::vector<double> w(tau.size());
  std::transform(tau.begin(), tau.end(), w.begin(), [total](double t) { return t / total; });
  return w;
}

void ModelParams::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("model parameters: " + what); };
  if (tau.empty()) fail("at least one investor group is required");
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!(tau[i] > 0.0) || !std::isfinite(tau[i])) {
      fail("tau[" + std::to_string(i) + "] must be positive");
    }
  }
  if (!(tau_h > 0.0)) fail("tau_h must be positive");
  if (!(beta1 > 0.0)) fail("beta1 must be positive");
  if (!(beta2 > 0.0)) fail("beta2 must be positive");
  if (!(delta >= 0.0)) fail("delta must be non-negative");
  if (!(a1 >= 0.0)) fail("a1 must be non-negative");
  if (!(a2 >= 0.0)) fail("a2 must be non-negative");
  if (!(std::abs(s_star) <= 1.0)) fail("|s_star| must not exceed 1");
  for (double v : {gamma, kappa, kappa1, p0}) {
    if (!std::isfinite(v)) fail("non-finite coupling or offset");
  }
}

namespace presets {

ModelParams two_group() {
  ModelParams p;
  p.tau = {1.0, 15.0};
  p.tau_h = 1.0;
  p.beta1 = 1.1;
  p.beta2 = 1.0;
  p.delta = 0.02;
  p.gamma = 5.0;
  p.kappa = 1.0;
  return p;
}

ModelParams nine_group() {
  ModelParams p = two_group();
  p.tau.assign(std::begin(kNineGroupHorizons), std::end(kNineGroupHorizons));
  p.gamma = 10.0;
  return p;
}

ModelParams single_group(double gamma) {
  ModelParams p;
  p.tau = {1.0};
  p.tau_h = 1.0;
  p.beta1 = 1.1;
  p.beta2 = 1.0;
  p.delta = 0.0;
  p.gamma = gamma;
  return p;
}

ModelParams fast_slow() {
  ModelParams p = two_group();
  p.tau = {0.01, 25.0};
  return p;
}

}  // namespace presets

double aggregate_sentiment(std::span<const double> s, std::span<const double> tau) {
  if (s.size() != tau.size()) throw ConfigError("aggregate_sentiment: length mismatch");
  if (s.empty()) throw ConfigError("aggregate_sentiment: empty input");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(tau[i] > 0.0)) throw ConfigError("aggregate_sentiment: non-positive horizon");
    num += tau[i] * s[i];
    den += tau[i];
  }
  return num / den;
}

double sentiment_rhs(double s_i, double h, std::size_t i, const ModelParams& params) {
  if (i >= params.groups()) throw ConfigError("sentiment_rhs: group index out of range");
  return (-s_i + std::tanh(params.beta1 * s_i + params.beta2 * h)) / params.tau[i];
}

double information_rhs_reduced(double h, double s_rate_agg, double xi,
                               const ModelParams& params) {
  return (-h + std::tanh(params.gamma * s_rate_agg + params.delta + params.kappa * xi)) /
         params.tau_h;
}

double information_rhs_full(double h, double p_rate, double xi, const ModelParams& params) {
  return (-h + std::tanh(params.kappa1 * p_rate + params.kappa * xi)) / params.tau_h;
}

double price_rhs(double s_rate, double s, const ModelParams& params) {
  return params.a1 * s_rate + params.a2 * (s - params.s_star);
}

ModelParams homogeneous_params(const ModelParams& params, std::optional<double> tau_s) {
  ModelParams out = params;
  double horizon = 0.0;
  if (tau_s) {
    horizon = *tau_s;
  } else {
    const auto w = params.weights();
    for (std::size_t i = 0; i < w.size(); ++i) horizon += w[i] * params.tau[i];
  }
  if (!(horizon > 0.0)) throw ConfigError("homogeneous_params: tau_s must be positive");
  out.tau = {horizon};
  return out;
}

std::vector<double> pack_state(const MarketState& state) {
  std::vector<double> y(state_size(state.s.size()));
  y[kInfoIndex] = state.h;
  std::copy(state.s.begin(), state.s.end(), y.begin() + 1);
  y.back() = state.p;
  return y;
}

MarketState unpack_state(std::span<const double> y, double t) {
  MarketState st;
  st.t = t;
  st.h = y[kInfoIndex];
  st.s.assign(y.begin() + 1, y.end() - 1);
  st.p = y.back();
  return st;
}

void system_rhs(const ModelParams& params, SystemKind system, std::span<const double> y,
                double xi, std::span<double> dydt) {
  const std::size_t n = params.groups();
  const double h = y[kInfoIndex];
  double rate_num = 0.0;
  double level_num = 0.0;
  double tau_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s_i = y[i + 1];
    const double tau_i = params.tau[i];
    const double rate = (-s_i + std::tanh(params.beta1 * s_i + params.beta2 * h)) / tau_i;
    dydt[i + 1] = rate;
    // tau_i * rate is the unscaled group drive; summing it avoids a division.
    rate_num += tau_i * rate;
    level_num += tau_i * s_i;
    tau_total += tau_i;
  }
  const double s_rate = rate_num / tau_total;
  const double s_agg = level_num / tau_total;
  const double p_rate = price_rhs(s_rate, s_agg, params);
  dydt[price_index(n)] = p_rate;
  dydt[kInfoIndex] = system == SystemKind::reduced
                         ? information_rhs_reduced(h, s_rate, xi, params)
                         : information_rhs_full(h, p_rate, xi, params);
}

double clamped_atanh(double x, ClampCounter& counter) noexcept {
  constexpr double lim = 1.0 - kAtanhMargin;
  if (x > lim) {
    ++counter.clamps;
    x = lim;
  } else if (x < -lim) {
    ++counter.clamps;
    x = -lim;
  }
  return std::atanh(x);
}

}  // namespace hetmarket
