#pragma once

// Exogenous news generation and fixed-step RK4 integration of the market
// model.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetmarket/model.hpp"

namespace hetmarket {

struct NoiseSpec {
  std::uint64_t seed = 0;
  /// Resolution of the news process; independent of the integration step.
  int substeps_per_day = 2;
  /// AR(1) coefficient between consecutive slots of the same day.
  double intraday_rho = 0.2;
  /// Variance of the daily mean of the slot values.
  double daily_variance = 1.0;

  void validate() const;
};

/// Piecewise-constant news realization xi(t) on slots of length
/// 1 / substeps_per_day, starting at t = 0.
class NoiseSeries {
 public:
  NoiseSeries() = default;
  NoiseSeries(int substeps_per_day, std::vector<double> values);

  /// Deterministic-zero news covering `days` days.
  static NoiseSeries zero(std::size_t days);

  int substeps_per_day() const noexcept { return substeps_per_day_; }
  std::size_t days() const noexcept;
  std::span<const double> values() const noexcept { return values_; }
  bool empty() const noexcept { return values_.empty(); }

  /// Value held on the slot containing t. Times past the end reuse the last slot.
  double at(double t) const noexcept;
  /// Mean of the slot values of day `day`.
  double daily_mean(std::size_t day) const;

 private:
  int substeps_per_day_ = 1;
  std::vector<double> values_;
};

/// Draws `days` days of news: independent standard-normal innovations per
/// day, AR(1) within the day, scaled so that the daily mean has variance
/// `daily_variance`.
NoiseSeries generate_noise(const NoiseSpec& spec, std::size_t days);

struct SimulationConfig {
  ModelParams params;
  MarketState initial;
  double horizon = 100.0;           ///< days of output after burn-in
  std::optional<double> dt;         ///< default min(tau_i, tau_h) / 20
  std::optional<NoiseSpec> noise;   ///< nullopt means xi == 0
  double output_stride = 1.0;       ///< days between stored states
  SystemKind system = SystemKind::reduced;
  double burn_in = 0.0;             ///< integrated and discarded before t = 0

  double effective_dt() const;
  void validate() const;
};

/// Default substep: min(tau_i, tau_h) / 20.
double default_dt(const ModelParams& params);

struct Trajectory {
  ModelParams params;
  SystemKind system = SystemKind::reduced;
  std::vector<MarketState> states;
  NoiseSeries noise;  ///< covers burn-in followed by the stored horizon
  double dt = 0.0;
  double burn_in = 0.0;
  /// Largest |s_i| and |h| seen at any substep, burn-in included.
  double max_abs_sentiment = 0.0;
  double max_abs_information = 0.0;
  std::vector<std::string> warnings;

  /// Column i of the stored sentiments.
  std::vector<double> sentiment(std::size_t group) const;
  std::vector<double> aggregate() const;
  std::vector<double> times() const;
};

/// Forward invariance tolerance on |s_i| and |h|.
inline constexpr double kBoxTolerance = 1e-9;

/// Reusable RK4 stepper over the packed state y = [h, s..., p].
class Rk4Stepper {
 public:
  Rk4Stepper(const ModelParams& params, SystemKind system);

  /// Advances y in place by dt with the news value held constant.
  /// Throws NumericalError on a non-finite result.
  void advance(std::span<double> y, double xi, double dt);

 private:
  ModelParams params_;
  SystemKind system_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

/// One classical RK4 step of the market model.
MarketState step(const MarketState& state, double xi, double dt, const ModelParams& params,
                 SystemKind system = SystemKind::reduced);

Trajectory simulate(const SimulationConfig& config);

/// Positive root of s = tanh(beta1 s) (zero when beta1 <= 1).
double ordered_sentiment(double beta1);

/// Sentiment paths driven by an exogenous daily information series.
struct SentimentPaths {
  /// levels[k][i]: sentiment of group i at day k (k = 0 is the initial state).
  std::vector<std::vector<double>> levels;
  std::vector<double> aggregate;
};

/// Integrates the group equations with h given (no feedback). h is linearly
/// interpolated between daily samples; the substep divides one day into
/// ceil(20 / min(tau_i)) pieces unless `substeps_per_day` is supplied.
SentimentPaths drive_with_information(std::span<const double> h_daily,
                                      const ModelParams& params,
                                      std::span<const double> initial_s,
                                      std::optional<int> substeps_per_day = std::nullopt);

}  // namespace hetmarket
