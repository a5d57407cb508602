#include "hetmarket/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hetmarket/errors.hpp"

namespace hetmarket {

namespace {

// Number of whole steps of length dt that make up `span`, or nullopt when
// span is not an integer multiple of dt.
std::optional<long long> whole_steps(double span, double dt) {
  const double ratio = span / dt;
  const long long n = std::llround(ratio);
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
    return std::nullopt;
  }
  return n;
}

// Sum over the M x M AR(1) correlation matrix rho^|j-k|.
double ar1_block_sum(int m, double rho) {
  double total = static_cast<double>(m);
  double power = 1.0;
  for (int lag = 1; lag < m; ++lag) {
    power *= rho;
    total += 2.0 * static_cast<double>(m - lag) * power;
  }
  return total;
}

}  // namespace

void NoiseSpec::validate() const {
  if (substeps_per_day < 1) throw ConfigError("noise: substeps_per_day must be >= 1");
  if (!(intraday_rho >= 0.0 && intraday_rho < 1.0)) {
    throw ConfigError("noise: intraday_rho must lie in [0, 1)");
  }
  if (!(daily_variance >= 0.0) || !std::isfinite(daily_variance)) {
    throw ConfigError("noise: daily_variance must be non-negative");
  }
}

NoiseSeries::NoiseSeries(int substeps_per_day, std::vector<double> values)
    : substeps_per_day_(substeps_per_day), values_(std::move(values)) {
  if (substeps_per_day_ < 1) throw ConfigError("noise: substeps_per_day must be >= 1");
  if (values_.size() % static_cast<std::size_t>(substeps_per_day_) != 0) {
    throw ConfigError("noise: slot count is not a whole number of days");
  }
}

NoiseSeries NoiseSeries::zero(std::size_t days) {
  return NoiseSeries(1, std::vector<double>(days, 0.0));
}

std::size_t NoiseSeries::days() const noexcept {
  return values_.size() / static_cast<std::size_t>(substeps_per_day_);
}

double NoiseSeries::at(double t) const noexcept {
  if (values_.empty()) return 0.0;
  // The offset keeps slot boundaries hit by accumulated step times on the
  // slot that starts there.
  const double pos = t * substeps_per_day_ + 1e-9;
  if (pos <= 0.0) return values_.front();
  const auto slot = static_cast<std::size_t>(pos);
  return values_[std::min(slot, values_.size() - 1)];
}

double NoiseSeries::daily_mean(std::size_t day) const {
  if (day >= days()) throw ConfigError("noise: day out of range");
  const auto m = static_cast<std::size_t>(substeps_per_day_);
  double sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) sum += values_[day * m + k];
  return sum / static_cast<double>(m);
}

NoiseSeries generate_noise(const NoiseSpec& spec, std::size_t days) {
  spec.validate();
  const int m = spec.substeps_per_day;
  std::vector<double> values(days * static_cast<std::size_t>(m), 0.0);
  if (spec.daily_variance == 0.0) return NoiseSeries(m, std::move(values));

  const double rho = spec.intraday_rho;
  const double innovation = std::sqrt(1.0 - rho * rho);
  // Unit-variance AR(1) slots have Var(daily mean) = block_sum / m^2.
  const double scale =
      std::sqrt(spec.daily_variance) * static_cast<double>(m) / std::sqrt(ar1_block_sum(m, rho));

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::size_t idx = 0;
  for (std::size_t d = 0; d < days; ++d) {
    double x = normal(rng);
    values[idx++] = scale * x;
    for (int k = 1; k < m; ++k) {
      x = rho * x + innovation * normal(rng);
      values[idx++] = scale * x;
    }
  }
  return NoiseSeries(m, std::move(values));
}

double default_dt(const ModelParams& params) {
  double fastest = params.tau_h;
  for (double t : params.tau) fastest = std::min(fastest, t);
  return fastest / 20.0;
}

double SimulationConfig::effective_dt() const { return dt ? *dt : default_dt(params); }

void SimulationConfig::validate() const {
  params.validate();
  if (noise) noise->validate();
  if (initial.s.size() != params.groups()) {
    throw ConfigError("simulation: initial sentiment vector has the wrong length");
  }
  if (!(horizon > 0.0)) throw ConfigError("simulation: horizon must be positive");
  if (!(burn_in >= 0.0)) throw ConfigError("simulation: burn_in must be non-negative");
  const double step = effective_dt();
  if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("simulation: dt must be positive");
  if (!(output_stride > 0.0)) throw ConfigError("simulation: output_stride must be positive");
  if (!whole_steps(output_stride, step)) {
    throw ConfigError("simulation: output_stride must be an integer multiple of dt");
  }
  if (!whole_steps(burn_in, step)) {
    throw ConfigError("simulation: burn_in must be an integer multiple of dt");
  }
  if (std::abs(initial.h) > 1.0) throw ConfigError("simulation: |h(0)| exceeds 1");
  for (double s : initial.s) {
    if (std::abs(s) > 1.0) throw ConfigError("simulation: |s_i(0)| exceeds 1");
  }
}

std::vector<double> Trajectory::sentiment(std::size_t group) const {
  if (group >= params.groups()) throw ConfigError("trajectory: group index out of range");
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& st : states) out.push_back(st.s[group]);
  return out;
}

std::vector<double> Trajectory::aggregate() const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& st : states) out.push_back(aggregate_sentiment(st.s, params.tau));
  return out;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& st : states) out.push_back(st.t);
  return out;
}

Rk4Stepper::Rk4Stepper(const ModelParams& params, SystemKind system)
    : params_(params), system_(system) {
  const std::size_t n = state_size(params_.groups());
  k1_.resize(n);
  k2_.resize(n);
  k3_.resize(n);
  k4_.resize(n);
  tmp_.resize(n);
}

void Rk4Stepper::advance(std::span<double> y, double xi, double dt) {
  const std::size_t n = y.size();
  const double half = 0.5 * dt;
  system_rhs(params_, system_, y, xi, k1_);
  for (std::size_t j = 0; j < n; ++j) tmp_[j] = y[j] + half * k1_[j];
  system_rhs(params_, system_, tmp_, xi, k2_);
  for (std::size_t j = 0; j < n; ++j) tmp_[j] = y[j] + half * k2_[j];
  system_rhs(params_, system_, tmp_, xi, k3_);
  for (std::size_t j = 0; j < n; ++j) tmp_[j] = y[j] + dt * k3_[j];
  system_rhs(params_, system_, tmp_, xi, k4_);
  const double sixth = dt / 6.0;
  bool finite = true;
  for (std::size_t j = 0; j < n; ++j) {
    y[j] += sixth * (k1_[j] + 2.0 * k2_[j] + 2.0 * k3_[j] + k4_[j]);
    finite = finite && std::isfinite(y[j]);
  }
  if (!finite) throw NumericalError("integration produced a non-finite state");
}

MarketState step(const MarketState& state, double xi, double dt, const ModelParams& params,
                 SystemKind system) {
  if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
  if (state.s.size() != params.groups()) throw ConfigError("step: state/params size mismatch");
  auto y = pack_state(state);
  Rk4Stepper stepper(params, system);
  stepper.advance(y, xi, dt);
  return unpack_state(y, state.t + dt);
}

Trajectory simulate(const SimulationConfig& config) {
  config.validate();
  const double dt = config.effective_dt();
  const std::size_t groups = config.params.groups();
  const long long per_output = *whole_steps(config.output_stride, dt);
  const long long burn_steps = *whole_steps(config.burn_in, dt);
  const auto outputs = static_cast<long long>(std::floor(config.horizon / config.output_stride + 1e-9));
  const long long total_steps = burn_steps + outputs * per_output;

  Trajectory traj;
  traj.params = config.params;
  traj.system = config.system;
  traj.dt = dt;
  traj.burn_in = static_cast<double>(burn_steps) * dt;

  double fastest = config.params.tau_h;
  for (double t : config.params.tau) fastest = std::min(fastest, t);
  if (dt > fastest / 10.0) {
    traj.warnings.push_back("dt exceeds min(tau_i, tau_h) / 10");
  }

  const auto noise_days = static_cast<std::size_t>(
      std::ceil(static_cast<double>(total_steps) * dt - 1e-9)) + 1;
  traj.noise = config.noise ? generate_noise(*config.noise, noise_days)
                            : NoiseSeries::zero(noise_days);

  auto y = pack_state(config.initial);
  Rk4Stepper stepper(config.params, config.system);
  traj.states.reserve(static_cast<std::size_t>(outputs) + 1);

  double p_shift = 0.0;
  double max_s = 0.0;
  double max_h = std::abs(y[kInfoIndex]);
  for (std::size_t i = 0; i < groups; ++i) max_s = std::max(max_s, std::abs(y[i + 1]));

  auto record = [&](long long out_index) {
    auto st = unpack_state(y, static_cast<double>(out_index) * config.output_stride);
    st.p += p_shift;
    traj.states.push_back(std::move(st));
  };

  if (burn_steps == 0) record(0);
  for (long long n = 0; n < total_steps; ++n) {
    const double t_abs = static_cast<double>(n) * dt;
    stepper.advance(y, traj.noise.at(t_abs), dt);

    max_h = std::max(max_h, std::abs(y[kInfoIndex]));
    for (std::size_t i = 0; i < groups; ++i) max_s = std::max(max_s, std::abs(y[i + 1]));

    const long long done = n + 1;
    if (done == burn_steps) {
      p_shift = config.initial.p - y.back();
      record(0);
    } else if (done > burn_steps && (done - burn_steps) % per_output == 0) {
      record((done - burn_steps) / per_output);
    }
  }

  traj.max_abs_sentiment = max_s;
  traj.max_abs_information = max_h;
  if (max_s > 1.0 + kBoxTolerance || max_h > 1.0 + kBoxTolerance) {
    throw NumericalError("trajectory left the invariant box |s_i|, |h| <= 1");
  }
  return traj;
}

double ordered_sentiment(double beta1) {
  if (beta1 <= 1.0) return 0.0;
  // g(s) = tanh(beta1 s) - s is positive on (0, s0) and negative on (s0, 1].
  double lo = 1e-12;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::tanh(beta1 * mid) - mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SentimentPaths drive_with_information(std::span<const double> h_daily,
                                      const ModelParams& params,
                                      std::span<const double> initial_s,
                                      std::optional<int> substeps_per_day) {
  params.validate();
  const std::size_t n = params.groups();
  if (initial_s.size() != n) throw ConfigError("drive_with_information: initial size mismatch");
  if (h_daily.empty()) throw DataError("drive_with_information: empty information series");
  for (std::size_t k = 0; k < h_daily.size(); ++k) {
    if (!(std::abs(h_daily[k]) <= 1.0)) {
      throw DataError("drive_with_information: h out of [-1, 1] at sample " + std::to_string(k));
    }
  }

  int m = 0;
  if (substeps_per_day) {
    m = *substeps_per_day;
  } else {
    const double fastest = *std::min_element(params.tau.begin(), params.tau.end());
    m = static_cast<int>(std::ceil(20.0 / fastest - 1e-9));
  }
  if (m < 1) throw ConfigError("drive_with_information: substeps_per_day must be >= 1");
  const double dt = 1.0 / m;

  SentimentPaths out;
  out.levels.reserve(h_daily.size());
  out.aggregate.reserve(h_daily.size());
  std::vector<double> s(initial_s.begin(), initial_s.end());
  out.levels.push_back(s);
  out.aggregate.push_back(aggregate_sentiment(s, params.tau));

  const double b1 = params.beta1;
  const double b2 = params.beta2;
  for (std::size_t k = 0; k + 1 < h_daily.size(); ++k) {
    const double h0 = h_daily[k];
    const double slope = h_daily[k + 1] - h0;
    for (int j = 0; j < m; ++j) {
      const double ha = h0 + slope * (j * dt);
      const double hm = h0 + slope * ((j + 0.5) * dt);
      const double hb = h0 + slope * ((j + 1) * dt);
      for (std::size_t i = 0; i < n; ++i) {
        const double inv_tau = 1.0 / params.tau[i];
        const double si = s[i];
        const double r1 = (-si + std::tanh(b1 * si + b2 * ha)) * inv_tau;
        const double x2 = si + 0.5 * dt * r1;
        const double r2 = (-x2 + std::tanh(b1 * x2 + b2 * hm)) * inv_tau;
        const double x3 = si + 0.5 * dt * r2;
        const double r3 = (-x3 + std::tanh(b1 * x3 + b2 * hm)) * inv_tau;
        const double x4 = si + dt * r3;
        const double r4 = (-x4 + std::tanh(b1 * x4 + b2 * hb)) * inv_tau;
        s[i] = si + dt / 6.0 * (r1 + 2.0 * r2 + 2.0 * r3 + r4);
      }
    }
    for (double v : s) {
      if (!std::isfinite(v)) throw NumericalError("drive_with_information: non-finite sentiment");
    }
    out.levels.push_back(s);
    out.aggregate.push_back(aggregate_sentiment(s, params.tau));
  }
  return out;
}

}  // namespace hetmarket
