#pragma once

// Oscillator form of the reduced system: each group's sentiment is a
// particle of mass tau_i moving in a potential U with nonlinear damping G,
// pushed by the other groups (coupling force) and by exogenous news.
//
//   tau_i s_i'' + G(s_i) s_i' + U'(s_i) = F_i^c + F^e
//
// The file also holds the phase-space diagnostics built on the reduced
// system: equilibria, isocline, the shared-information constraint, limit
// cycle detection and the adiabatic residual of a fast group.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hetmarket/model.hpp"
#include "hetmarket/simulation.hpp"

namespace hetmarket {

/// Quartic coefficient of the truncated potential.
///  - series_consistent: (3 beta1 - 2) / 12, the coefficient produced by the
///    cubic Taylor expansion of the exact second-order equation. Gives a
///    genuine double well for beta1 > 1.
///  - published: (beta1 - 2) / 4 as printed with the oscillator form.
enum class QuarticConvention { series_consistent, published };

struct OscillatorDecomposition {
  std::size_t group = 0;
  double tau_i = 1.0;
  double tau_h = 1.0;
  double beta2 = 1.0;
  double gamma_bar = 0.0;
  double kappa = 1.0;
  std::vector<double> tau;  ///< all horizons, for the coupling force

  /// U(s) = u4 s^4 + u2 s^2 + u1 s
  double u4 = 0.0, u2 = 0.0, u1 = 0.0;
  /// G(s) = g0 + g1 s + g2 s^2
  double g0 = 0.0, g1 = 0.0, g2 = 0.0;

  double potential(double s) const noexcept;
  double potential_slope(double s) const noexcept;
  double damping(double s) const noexcept;
  /// Force from the other groups; `rates` holds ds_j/dt for every group.
  double coupling_force(std::span<const double> rates) const;
  double news_force(double xi) const noexcept;
  double energy(double s, double s_rate) const noexcept;
};

OscillatorDecomposition decompose(const ModelParams& params, std::size_t group,
                                  QuarticConvention convention = QuarticConvention::series_consistent);

double potential(double s, const ModelParams& params,
                 QuarticConvention convention = QuarticConvention::series_consistent);
double damping(double s, std::size_t group, const ModelParams& params);
double coupling_force(std::size_t group, std::span<const double> s_rates, const ModelParams& params);
double news_force(double xi, const ModelParams& params);
double energy(double s, double s_rate, std::size_t group, const ModelParams& params,
              QuarticConvention convention = QuarticConvention::series_consistent);

/// Local threshold on gamma_bar above which G(s) < 0. Requires |s| < 1.
double critical_gamma_local(double s, std::size_t group, const ModelParams& params);
/// Leading-order global threshold: sum(tau_i) / beta2.
double critical_gamma(const ModelParams& params);
/// Per-group threshold keeping the (beta1 - 1) tau_h / tau_i correction.
double critical_gamma_for_group(std::size_t group, const ModelParams& params);

/// tau_i s_i'' of the exact reduced system, expressed through s_i, its rate,
/// the aggregate rate and the news value.
double exact_inertial_force(double s, double s_rate, double aggregate_rate, double xi,
                            std::size_t group, const ModelParams& params);
/// The truncated counterpart -G s' - U' + F^c + F^e.
double truncated_inertial_force(double s, double s_rate, std::span<const double> all_rates,
                                double xi, const OscillatorDecomposition& osc);

/// Which terms of the oscillator equation are kept when integrating it.
struct OscillatorTerms {
  bool damping = true;
  bool news = false;
  double xi = 0.0;
};

struct OscillatorSample {
  double t, s, s_rate;
};

/// RK4 integration of a single isolated oscillator (coupling force zero).
std::vector<OscillatorSample> integrate_oscillator(const OscillatorDecomposition& osc,
                                                   double s0, double v0, double dt,
                                                   double horizon, OscillatorTerms terms,
                                                   std::size_t sample_every = 1);

enum class Stability { stable, unstable, marginal };
enum class PointKind { node, focus, saddle, unnamed };

struct EquilibriumPoint {
  std::vector<double> s;  ///< one entry per group
  double h = 0.0;
  Stability stability = Stability::marginal;
  PointKind kind = PointKind::unnamed;
  std::vector<std::complex<double>> eigenvalues;
  /// Largest |RHS| of the reduced system at the point (xi = 0).
  double residual = 0.0;
};

/// Roots of s = tanh(beta1 s + beta2 h) on [-1, 1], ascending, refined to 1e-12.
std::vector<double> sentiment_roots(const ModelParams& params, double h);

/// Jacobian of the reduced system (state order s_1..s_N, h; price excluded).
std::vector<std::vector<double>> reduced_jacobian(const ModelParams& params,
                                                  std::span<const double> s, double h);

/// Equilibria at information level h. Each group sits on one of the roots;
/// for a single group the 2x2 Jacobian classifies the point as node, focus
/// or saddle, for several groups only eigenvalues are reported. The points
/// are fixed points of the full reduced system only when h = tanh(delta).
std::vector<EquilibriumPoint> find_equilibria(const ModelParams& params, double h);
/// Fixed points of the reduced system with xi = 0 (h = tanh(delta)).
std::vector<EquilibriumPoint> find_equilibria(const ModelParams& params);

/// h on which ds/dt = 0: (arctanh(s) - beta1 s) / beta2. Requires |s| < 1.
double isocline(double s, const ModelParams& params);

/// Information level implied by a group's state, inverting its sentiment
/// equation. Requires |s + tau_i s'| < 1.
double invert_information(double s, double s_rate, std::size_t group, const ModelParams& params);

/// Ratio of the information levels implied by two groups; 1 when they share h.
double constraint_residual(double s_i, double s_rate_i, double tau_i, double s_j,
                           double s_rate_j, double tau_j, const ModelParams& params);

struct ConstraintScan {
  double max_deviation = 0.0;  ///< max |f_ij - 1| over evaluated samples
  std::size_t evaluated = 0;
  std::size_t undefined = 0;   ///< samples with a vanishing denominator
  std::size_t clamps = 0;      ///< arctanh arguments clamped
};

/// Largest deviation of f_ij from 1 over all group pairs and stored states,
/// with the rates evaluated from the model at each state.
ConstraintScan scan_constraints(const Trajectory& trajectory);

struct CycleReport {
  bool found = false;
  double period = 0.0;
  double amplitude = 0.0;
  std::size_t cycles = 0;
  double amplitude_ratio = 0.0;  ///< last quarter over the quarter before it
};

/// Detects a sustained oscillation in a sampled signal from `transient` on.
CycleReport detect_limit_cycle(std::span<const double> times, std::span<const double> values,
                               double transient = 0.0);
CycleReport detect_limit_cycle(const Trajectory& trajectory, std::size_t group,
                               double transient = 0.0);

/// Per-sample |-s_f + tanh(beta1 s_f + beta2 h)| of the fast group.
std::vector<double> adiabatic_residual(const Trajectory& trajectory, std::size_t fast_group,
                                       const ModelParams& params);

}  // namespace hetmarket
