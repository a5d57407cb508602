#include "hetmarket/oscillator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetmarket/errors.hpp"

namespace hetmarket {

namespace {

constexpr double kDenominatorFloor = 1e-9;
constexpr double kCycleAmplitudeFloor = 1e-6;
constexpr std::size_t kMaxEquilibria = 100000;

void check_group(std::size_t group, const ModelParams& params, const char* who) {
  if (group >= params.groups()) {
    throw ConfigError(std::string(who) + ": group index out of range");
  }
}

double sech2(double x) {
  const double t = std::tanh(x);
  return 1.0 - t * t;
}

}  // namespace

double OscillatorDecomposition::potential(double s) const noexcept {
  const double s2 = s * s;
  return u4 * s2 * s2 + u2 * s2 + u1 * s;
}

double OscillatorDecomposition::potential_slope(double s) const noexcept {
  return 4.0 * u4 * s * s * s + 2.0 * u2 * s + u1;
}

double OscillatorDecomposition::damping(double s) const noexcept {
  return g0 + g1 * s + g2 * s * s;
}

double OscillatorDecomposition::coupling_force(std::span<const double> rates) const {
  if (rates.size() != tau.size()) throw ConfigError("coupling_force: rates length mismatch");
  double sum = 0.0;
  for (std::size_t j = 0; j < rates.size(); ++j) {
    if (j != group) sum += tau[j] * rates[j];
  }
  return beta2 * gamma_bar / tau_h * sum;
}

double OscillatorDecomposition::news_force(double xi) const noexcept {
  return beta2 / tau_h * kappa * xi;
}

double OscillatorDecomposition::energy(double s, double s_rate) const noexcept {
  return 0.5 * tau_i * s_rate * s_rate + potential(s);
}

OscillatorDecomposition decompose(const ModelParams& params, std::size_t group,
                                  QuarticConvention convention) {
  check_group(group, params, "decompose");
  OscillatorDecomposition osc;
  osc.group = group;
  osc.tau_i = params.tau[group];
  osc.tau_h = params.tau_h;
  osc.beta2 = params.beta2;
  osc.gamma_bar = params.gamma_bar();
  osc.kappa = params.kappa;
  osc.tau = params.tau;

  const double b1 = params.beta1;
  const double quartic = convention == QuarticConvention::series_consistent
                             ? (3.0 * b1 - 2.0) / 12.0
                             : (b1 - 2.0) / 4.0;
  osc.u4 = quartic / params.tau_h;
  osc.u2 = -(b1 - 1.0) / 2.0 / params.tau_h;
  osc.u1 = -params.beta2 * params.delta / params.tau_h;

  const double r = osc.tau_i / params.tau_h;
  const double fb = params.beta2 * osc.gamma_bar * r;
  osc.g0 = 1.0 - b1 - fb + r;
  osc.g1 = 2.0 * params.beta2 * r * params.delta;
  osc.g2 = b1 + fb + 2.0 * (b1 - 1.0) * r;
  return osc;
}

double potential(double s, const ModelParams& params, QuarticConvention convention) {
  return decompose(params, 0, convention).potential(s);
}

double damping(double s, std::size_t group, const ModelParams& params) {
  return decompose(params, group).damping(s);
}

double coupling_force(std::size_t group, std::span<const double> s_rates,
                      const ModelParams& params) {
  return decompose(params, group).coupling_force(s_rates);
}

double news_force(double xi, const ModelParams& params) {
  return params.beta2 / params.tau_h * params.kappa * xi;
}

double energy(double s, double s_rate, std::size_t group, const ModelParams& params,
              QuarticConvention convention) {
  return decompose(params, group, convention).energy(s, s_rate);
}

double critical_gamma_local(double s, std::size_t group, const ModelParams& params) {
  check_group(group, params, "critical_gamma_local");
  if (!(std::abs(s) < 1.0)) throw DomainError("critical_gamma_local: |s| must be below 1");
  const double b1 = params.beta1;
  const double b2 = params.beta2;
  const double r = params.tau[group] / params.tau_h;
  const double num = (1.0 - b1 + r) + 2.0 * b2 * r * params.delta * s +
                     (b1 + 2.0 * (b1 - 1.0) * r) * s * s;
  return num / (b2 * r * (1.0 - s * s));
}

double critical_gamma(const ModelParams& params) { return params.tau_sum() / params.beta2; }

double critical_gamma_for_group(std::size_t group, const ModelParams& params) {
  check_group(group, params, "critical_gamma_for_group");
  return (1.0 - (params.beta1 - 1.0) * params.tau_h / params.tau[group]) / params.beta2 *
         params.tau_sum();
}

double exact_inertial_force(double s, double s_rate, double aggregate_rate, double xi,
                            std::size_t group, const ModelParams& params) {
  check_group(group, params, "exact_inertial_force");
  const double w = s + params.tau[group] * s_rate;
  if (!(std::abs(w) < 1.0)) throw DomainError("exact_inertial_force: |s + tau s'| must be below 1");
  const double b1 = params.beta1;
  const double th = params.tau_h;
  const double squeeze = 1.0 - w * w;
  const double drive = std::tanh(params.gamma * aggregate_rate + params.delta + params.kappa * xi);
  return -s_rate + squeeze * (b1 * s_rate + b1 / th * s - std::atanh(w) / th) +
         squeeze * params.beta2 / th * drive;
}

double truncated_inertial_force(double s, double s_rate, std::span<const double> all_rates,
                                double xi, const OscillatorDecomposition& osc) {
  return -osc.damping(s) * s_rate - osc.potential_slope(s) + osc.coupling_force(all_rates) +
         osc.news_force(xi);
}

std::vector<OscillatorSample> integrate_oscillator(const OscillatorDecomposition& osc,
                                                   double s0, double v0, double dt,
                                                   double horizon, OscillatorTerms terms,
                                                   std::size_t sample_every) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ConfigError("integrate_oscillator: bad dt or horizon");
  if (sample_every == 0) sample_every = 1;
  const double forcing = terms.news ? osc.news_force(terms.xi) : 0.0;
  auto accel = [&](double s, double v) {
    const double drag = terms.damping ? osc.damping(s) * v : 0.0;
    return (-drag - osc.potential_slope(s) + forcing) / osc.tau_i;
  };

  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  std::vector<OscillatorSample> out;
  out.reserve(steps / sample_every + 2);
  double s = s0;
  double v = v0;
  out.push_back({0.0, s, v});
  for (std::size_t n = 1; n <= steps; ++n) {
    const double ks1 = v;
    const double kv1 = accel(s, v);
    const double ks2 = v + 0.5 * dt * kv1;
    const double kv2 = accel(s + 0.5 * dt * ks1, ks2);
    const double ks3 = v + 0.5 * dt * kv2;
    const double kv3 = accel(s + 0.5 * dt * ks2, ks3);
    const double ks4 = v + dt * kv3;
    const double kv4 = accel(s + dt * ks3, ks4);
    s += dt / 6.0 * (ks1 + 2.0 * ks2 + 2.0 * ks3 + ks4);
    v += dt / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
    if (!std::isfinite(s) || !std::isfinite(v)) {
      throw NumericalError("integrate_oscillator: non-finite state");
    }
    if (n % sample_every == 0 || n == steps) out.push_back({static_cast<double>(n) * dt, s, v});
  }
  return out;
}

std::vector<double> sentiment_roots(const ModelParams& params, double h) {
  if (!(std::abs(h) <= 1.0)) throw ConfigError("sentiment_roots: |h| must not exceed 1");
  const double b1 = params.beta1;
  const double drive = params.beta2 * h;
  auto g = [&](double s) { return std::tanh(b1 * s + drive) - s; };

  constexpr int cells = 4000;
  std::vector<double> roots;
  auto push = [&roots](double r) {
    if (roots.empty() || std::abs(r - roots.back()) > 1e-10) roots.push_back(r);
  };
  double x0 = -1.0;
  double g0 = g(x0);
  for (int k = 1; k <= cells; ++k) {
    const double x1 = -1.0 + 2.0 * k / cells;
    const double g1 = g(x1);
    if (g0 == 0.0) {
      push(x0);
    } else if ((g0 < 0.0) != (g1 < 0.0) && g1 != 0.0) {
      double lo = x0, hi = x1, glo = g0;
      while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      push(0.5 * (lo + hi));
    }
    x0 = x1;
    g0 = g1;
  }
  if (g0 == 0.0) push(x0);
  return roots;
}

std::vector<std::vector<double>> reduced_jacobian(const ModelParams& params,
                                                  std::span<const double> s, double h) {
  const std::size_t n = params.groups();
  if (s.size() != n) throw ConfigError("reduced_jacobian: state size mismatch");
  const double total = params.tau_sum();
  std::vector<std::vector<double>> jac(n + 1, std::vector<double>(n + 1, 0.0));

  double rate_num = 0.0;
  double dagg_dh = 0.0;
  std::vector<double> dagg_ds(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = params.beta1 * s[i] + params.beta2 * h;
    const double c = sech2(u);
    const double tau_i = params.tau[i];
    jac[i][i] = (-1.0 + params.beta1 * c) / tau_i;
    jac[i][n] = params.beta2 * c / tau_i;
    rate_num += -s[i] + std::tanh(u);
    dagg_ds[i] = (-1.0 + params.beta1 * c) / total;
    dagg_dh += params.beta2 * c / total;
  }
  const double agg_rate = rate_num / total;
  const double cv = sech2(params.gamma * agg_rate + params.delta);
  for (std::size_t j = 0; j < n; ++j) {
    jac[n][j] = cv * params.gamma * dagg_ds[j] / params.tau_h;
  }
  jac[n][n] = (-1.0 + cv * params.gamma * dagg_dh) / params.tau_h;
  return jac;
}

namespace {

EquilibriumPoint classify(const ModelParams& params, std::vector<double> s, double h) {
  EquilibriumPoint pt;
  pt.s = std::move(s);
  pt.h = h;

  const auto jac = reduced_jacobian(params, pt.s, h);
  const auto dim = static_cast<Eigen::Index>(jac.size());
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = jac[r][c];
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  for (Eigen::Index k = 0; k < dim; ++k) pt.eigenvalues.push_back(solver.eigenvalues()[k]);
  std::sort(pt.eigenvalues.begin(), pt.eigenvalues.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  constexpr double tol = 1e-12;
  bool any_pos = false, any_zero = false, any_complex = false;
  int negatives = 0;
  for (const auto& ev : pt.eigenvalues) {
    if (ev.real() > tol) any_pos = true;
    else if (ev.real() < -tol) ++negatives;
    else any_zero = true;
    if (std::abs(ev.imag()) > tol) any_complex = true;
  }
  pt.stability = any_pos ? Stability::unstable : (any_zero ? Stability::marginal : Stability::stable);
  if (dim == 2 && !any_zero) {
    if (any_complex) pt.kind = PointKind::focus;
    else if (any_pos && negatives > 0) pt.kind = PointKind::saddle;
    else pt.kind = PointKind::node;
  }

  const std::size_t n = params.groups();
  std::vector<double> y(state_size(n), 0.0);
  std::vector<double> dy(y.size());
  y[kInfoIndex] = h;
  std::copy(pt.s.begin(), pt.s.end(), y.begin() + 1);
  system_rhs(params, SystemKind::reduced, y, 0.0, dy);
  for (std::size_t k = 0; k + 1 < dy.size(); ++k) pt.residual = std::max(pt.residual, std::abs(dy[k]));
  return pt;
}

}  // namespace

std::vector<EquilibriumPoint> find_equilibria(const ModelParams& params, double h) {
  params.validate();
  const auto roots = sentiment_roots(params, h);
  const std::size_t n = params.groups();
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i) {
    combos *= roots.size();
    if (combos > kMaxEquilibria) throw ConfigError("find_equilibria: too many root combinations");
  }

  std::vector<EquilibriumPoint> out;
  out.reserve(combos);
  std::vector<std::size_t> pick(n, 0);
  for (std::size_t c = 0; c < combos; ++c) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = roots[pick[i]];
    out.push_back(classify(params, std::move(s), h));
    for (std::size_t i = 0; i < n; ++i) {
      if (++pick[i] < roots.size()) break;
      pick[i] = 0;
    }
  }
  return out;
}

std::vector<EquilibriumPoint> find_equilibria(const ModelParams& params) {
  return find_equilibria(params, std::tanh(params.delta));
}

double isocline(double s, const ModelParams& params) {
  if (!(std::abs(s) < 1.0)) throw DomainError("isocline: |s| must be below 1");
  return (std::atanh(s) - params.beta1 * s) / params.beta2;
}

double invert_information(double s, double s_rate, std::size_t group, const ModelParams& params) {
  check_group(group, params, "invert_information");
  const double w = s + params.tau[group] * s_rate;
  if (!(std::abs(w) < 1.0)) throw DomainError("invert_information: |s + tau s'| must be below 1");
  return (std::atanh(w) - params.beta1 * s) / params.beta2;
}

double constraint_residual(double s_i, double s_rate_i, double tau_i, double s_j,
                           double s_rate_j, double tau_j, const ModelParams& params) {
  const double wi = s_i + tau_i * s_rate_i;
  const double wj = s_j + tau_j * s_rate_j;
  if (!(std::abs(wi) < 1.0) || !(std::abs(wj) < 1.0)) {
    throw DomainError("constraint_residual: arctanh argument outside (-1, 1)");
  }
  const double num = std::atanh(wi) - params.beta1 * s_i;
  const double den = std::atanh(wj) - params.beta1 * s_j;
  if (!(std::abs(den) > kDenominatorFloor)) {
    throw DomainError("constraint_residual: vanishing denominator");
  }
  return num / den;
}

ConstraintScan scan_constraints(const Trajectory& trajectory) {
  const ModelParams& params = trajectory.params;
  const std::size_t n = params.groups();
  ConstraintScan scan;
  ClampCounter counter;
  std::vector<double> implied(n);
  for (const auto& st : trajectory.states) {
    for (std::size_t i = 0; i < n; ++i) {
      const double rate = sentiment_rhs(st.s[i], st.h, i, params);
      implied[i] = clamped_atanh(st.s[i] + params.tau[i] * rate, counter) - params.beta1 * st.s[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        if (!(std::abs(implied[j]) > kDenominatorFloor)) {
          ++scan.undefined;
          continue;
        }
        scan.max_deviation = std::max(scan.max_deviation, std::abs(implied[i] / implied[j] - 1.0));
        ++scan.evaluated;
      }
    }
  }
  scan.clamps = counter.clamps;
  return scan;
}

CycleReport detect_limit_cycle(std::span<const double> times, std::span<const double> values,
                               double transient) {
  if (times.size() != values.size()) throw ConfigError("detect_limit_cycle: length mismatch");
  const auto first = static_cast<std::size_t>(
      std::lower_bound(times.begin(), times.end(), transient) - times.begin());
  const std::size_t n = times.size() - first;
  if (n < 16) throw DataError("detect_limit_cycle: window too short");
  const auto t = times.subspan(first);
  const auto x = values.subspan(first);

  CycleReport rep;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  rep.amplitude = 0.5 * (*hi - *lo);

  std::vector<double> ups;
  for (std::size_t k = 1; k < n; ++k) {
    const double a = x[k - 1] - mean;
    const double b = x[k] - mean;
    if (a < 0.0 && b >= 0.0) ups.push_back(t[k - 1] + (t[k] - t[k - 1]) * (-a) / (b - a));
  }
  if (ups.size() >= 2) {
    rep.cycles = ups.size() - 1;
    rep.period = (ups.back() - ups.front()) / static_cast<double>(rep.cycles);
  }

  auto half_range = [&](std::size_t b, std::size_t e) {
    const auto [qlo, qhi] = std::minmax_element(x.begin() + static_cast<std::ptrdiff_t>(b),
                                                x.begin() + static_cast<std::ptrdiff_t>(e));
    return 0.5 * (*qhi - *qlo);
  };
  const std::size_t q = n / 4;
  const double third = half_range(2 * q, 3 * q);
  const double fourth = half_range(3 * q, n);
  rep.amplitude_ratio = third > 0.0 ? fourth / third : 0.0;

  rep.found = rep.amplitude > kCycleAmplitudeFloor && rep.cycles >= 3 &&
              rep.amplitude_ratio >= 0.95 && rep.amplitude_ratio <= 1.05;
  return rep;
}

CycleReport detect_limit_cycle(const Trajectory& trajectory, std::size_t group, double transient) {
  return detect_limit_cycle(trajectory.times(), trajectory.sentiment(group), transient);
}

std::vector<double> adiabatic_residual(const Trajectory& trajectory, std::size_t fast_group,
                                       const ModelParams& params) {
  check_group(fast_group, params, "adiabatic_residual");
  std::vector<double> out;
  out.reserve(trajectory.states.size());
  for (const auto& st : trajectory.states) {
    const double s = st.s[fast_group];
    out.push_back(std::abs(-s + std::tanh(params.beta1 * s + params.beta2 * st.h)));
  }
  return out;
}

}  // namespace hetmarket
