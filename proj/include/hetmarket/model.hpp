#pragma once

// Model core: parameters, market state, and the right-hand sides of the
// heterogeneous news-driven market model.
//
//   tau_i ds_i/dt = -s_i + tanh(beta1 s_i + beta2 h)                (groups)
//   tau_h dh/dt   = -h + tanh(gamma ds/dt + delta + kappa xi)       (reduced)
//   tau_h dh/dt   = -h + tanh(kappa1 dp/dt + kappa xi)              (full)
//   dp/dt         = a1 ds/dt + a2 (s - s_star)
//
// with s = sum(tau_i s_i) / sum(tau_i) the capital-weighted aggregate.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hetmarket {

/// Horizons (business days) of the nine-group market used for the
/// empirical pipeline and the trading strategies.
inline constexpr double kNineGroupHorizons[] = {1, 2, 3, 4, 11, 15, 19, 24, 28};

struct ModelParams {
  std::vector<double> tau{1.0};  ///< investment horizons tau_i, one per group
  double tau_h = 1.0;            ///< information response time
  double beta1 = 1.1;            ///< herding
  double beta2 = 1.0;            ///< sensitivity to information
  double gamma = 0.0;            ///< feedback strength (= kappa1 * a1)
  double delta = 0.0;            ///< growth-rate constant
  double kappa = 1.0;            ///< exogenous-news coupling (kappa2)
  double kappa1 = 0.0;           ///< price-feedback coupling, full system only
  double a1 = 0.356;
  double a2 = 0.003;
  double s_star = 0.153;
  double p0 = 0.0;               ///< integration constant of the price path

  std::size_t groups() const noexcept { return tau.size(); }
  double tau_sum() const noexcept;
  /// gamma / sum(tau_i).
  double gamma_bar() const noexcept;
  /// alpha_i = tau_i / sum(tau_j).
  std::vector<double> weights() const;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Which feedback equation drives h.
enum class SystemKind { reduced, full };

struct MarketState {
  double t = 0.0;
  double h = 0.0;
  std::vector<double> s;
  double p = 0.0;
};

namespace presets {

/// Two-group market of the light/heavy illustration: tau = (1, 15), gamma = 5.
ModelParams two_group();
/// Nine-group market, gamma = 10.
ModelParams nine_group();
/// Single group with tau = tau_h = 1 used for the limit-cycle study.
ModelParams single_group(double gamma);
/// Fast/slow pair tau = (0.01, 25).
ModelParams fast_slow();

}  // namespace presets

double aggregate_sentiment(std::span<const double> s, std::span<const double> tau);

/// ds_i/dt of group i.
double sentiment_rhs(double s_i, double h, std::size_t i, const ModelParams& params);

/// dh/dt with the price feedback folded into gamma and delta.
double information_rhs_reduced(double h, double s_rate_agg, double xi,
                               const ModelParams& params);

/// dh/dt driven by the log-price rate; no delta term.
double information_rhs_full(double h, double p_rate, double xi, const ModelParams& params);

double price_rhs(double s_rate, double s, const ModelParams& params);

/// Collapses a parameter set onto a single group with horizon tau_s. When
/// tau_s is omitted the alpha-weighted mean horizon sum(alpha_i tau_i) is used.
ModelParams homogeneous_params(const ModelParams& params,
                               std::optional<double> tau_s = std::nullopt);

// State-vector layout used by the integrators: y = [h, s_1 .. s_N, p].
inline constexpr std::size_t kInfoIndex = 0;
inline std::size_t price_index(std::size_t groups) noexcept { return groups + 1; }
inline std::size_t state_size(std::size_t groups) noexcept { return groups + 2; }

std::vector<double> pack_state(const MarketState& state);
MarketState unpack_state(std::span<const double> y, double t);

/// Evaluates dy/dt for the packed state. `dydt` must have the size of `y`.
void system_rhs(const ModelParams& params, SystemKind system, std::span<const double> y,
                double xi, std::span<double> dydt);

/// Counts arctanh arguments that had to be pulled back inside (-1, 1).
struct ClampCounter {
  std::size_t clamps = 0;
};

inline constexpr double kAtanhMargin = 1e-12;

/// arctanh with its argument clamped to [-1 + 1e-12, 1 - 1e-12].
double clamped_atanh(double x, ClampCounter& counter) noexcept;

}  // namespace hetmarket
