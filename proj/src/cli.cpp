#include "hetmarket/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include "hetmarket/errors.hpp"
#include "hetmarket/io.hpp"
#include "hetmarket/performance.hpp"

namespace hetmarket::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---- config parsing ------------------------------------------------------

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
bool read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return false;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
  return true;
}

std::string resolve(const std::string& base, const std::string& path) {
  if (base.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).string();
}

Date read_date(const json& j, const char* key, const std::string& where) {
  std::string text;
  read(j, key, text, where);
  try {
    return Date::parse(text);
  } catch (const DataError& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

ModelParams parse_model(const json& j) {
  const std::string where = "model";
  check_keys(j, {"preset", "tau", "tau_h", "beta1", "beta2", "gamma", "delta", "kappa", "kappa1",
                 "a1", "a2", "s_star", "p0"},
             where);
  ModelParams p;
  std::string preset = "default";
  read(j, "preset", preset, where);
  if (preset == "two_group") {
    p = presets::two_group();
  } else if (preset == "nine_group") {
    p = presets::nine_group();
  } else if (preset == "single_group") {
    p = presets::single_group(0.0);
  } else if (preset == "fast_slow") {
    p = presets::fast_slow();
  } else if (preset != "default") {
    throw ConfigError("model.preset: unknown preset '" + preset + "'");
  }
  read(j, "tau", p.tau, where);
  read(j, "tau_h", p.tau_h, where);
  read(j, "beta1", p.beta1, where);
  read(j, "beta2", p.beta2, where);
  read(j, "gamma", p.gamma, where);
  read(j, "delta", p.delta, where);
  read(j, "kappa", p.kappa, where);
  read(j, "a1", p.a1, where);
  read(j, "a2", p.a2, where);
  read(j, "s_star", p.s_star, where);
  read(j, "p0", p.p0, where);
  // gamma = kappa1 * a1 links the two feedback forms
  if (!read(j, "kappa1", p.kappa1, where)) p.kappa1 = p.a1 > 0.0 ? p.gamma / p.a1 : 0.0;
  p.validate();
  return p;
}

std::optional<NoiseSpec> parse_noise(const json& j, std::uint64_t seed) {
  NoiseSpec spec;
  spec.seed = seed;
  if (j.is_null()) return spec;
  check_keys(j, {"enabled", "substeps_per_day", "intraday_rho", "daily_variance"}, "noise");
  bool enabled = true;
  read(j, "enabled", enabled, "noise");
  read(j, "substeps_per_day", spec.substeps_per_day, "noise");
  read(j, "intraday_rho", spec.intraday_rho, "noise");
  read(j, "daily_variance", spec.daily_variance, "noise");
  spec.validate();
  if (!enabled) return std::nullopt;
  return spec;
}

constexpr double kDefaultBurnIn = 200.0;

SimulationConfig parse_simulation(const json& j, const ModelParams& params, SystemKind system,
                                  std::optional<NoiseSpec> noise) {
  const std::string where = "simulation";
  check_keys(j, {"horizon", "dt", "output_stride", "burn_in", "initial"}, where);
  SimulationConfig sim;
  sim.params = params;
  sim.system = system;
  sim.noise = noise;
  read(j, "horizon", sim.horizon, where);
  double dt = 0.0;
  if (read(j, "dt", dt, where)) sim.dt = dt;
  read(j, "output_stride", sim.output_stride, where);
  // positive ordered state after a discarded burn-in unless configured
  sim.burn_in = kDefaultBurnIn;
  read(j, "burn_in", sim.burn_in, where);
  sim.initial.h = 0.0;
  sim.initial.s.assign(params.groups(), ordered_sentiment(params.beta1));
  sim.initial.p = params.p0;
  if (j.contains("initial")) {
    const json& init = j.at("initial");
    check_keys(init, {"h", "s", "p"}, "simulation.initial");
    read(init, "h", sim.initial.h, "simulation.initial");
    read(init, "s", sim.initial.s, "simulation.initial");
    read(init, "p", sim.initial.p, "simulation.initial");
  }
  sim.validate();
  return sim;
}

QuarticConvention parse_convention(const std::string& name) {
  if (name == "series_consistent") return QuarticConvention::series_consistent;
  if (name == "published") return QuarticConvention::published;
  throw ConfigError("analysis.quartic: expected 'series_consistent' or 'published'");
}

AnalysisSettings parse_analysis(const json& j, const ModelParams& params) {
  const std::string where = "analysis";
  check_keys(j, {"s_min", "s_max", "points", "rate_max", "rate_points", "group", "quartic"}, where);
  AnalysisSettings a;
  read(j, "s_min", a.s_min, where);
  read(j, "s_max", a.s_max, where);
  read(j, "points", a.points, where);
  read(j, "rate_max", a.rate_max, where);
  read(j, "rate_points", a.rate_points, where);
  read(j, "group", a.group, where);
  std::string conv;
  if (read(j, "quartic", conv, where)) a.convention = parse_convention(conv);
  if (!(a.s_min > -1.0 && a.s_max < 1.0 && a.s_min < a.s_max)) {
    throw ConfigError("analysis: need -1 < s_min < s_max < 1");
  }
  if (a.points < 3 || a.rate_points < 2 || !(a.rate_max > 0.0)) {
    throw ConfigError("analysis: grid too small");
  }
  if (a.group >= params.groups()) throw ConfigError("analysis.group: no such group");
  return a;
}

BacktestSettings parse_backtest(const json& j) {
  const std::string where = "backtest";
  check_keys(j, {"strategies", "forecast_substeps_per_day", "warmup", "start", "synthetic"}, where);
  BacktestSettings b;
  if (j.contains("strategies")) {
    const json& list = j.at("strategies");
    if (!list.is_array() || list.empty()) throw ConfigError("backtest.strategies: expected a non-empty array");
    b.strategies.clear();
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string w = "backtest.strategies[" + std::to_string(k) + "]";
      check_keys(list[k], {"name", "horizons", "dead_band"}, w);
      ForecastConfig f;
      f.name = "strategy_" + std::to_string(k + 1);
      read(list[k], "name", f.name, w);
      read(list[k], "horizons", f.horizons, w);
      read(list[k], "dead_band", f.dead_band, w);
      f.validate();
      b.strategies.push_back(std::move(f));
    }
  }
  int substeps = 0;
  if (read(j, "forecast_substeps_per_day", substeps, where)) b.forecast_substeps = substeps;
  read(j, "warmup", b.warmup, where);
  if (j.contains("start")) b.start = read_date(j, "start", where);
  if (j.contains("synthetic")) {
    const json& s = j.at("synthetic");
    check_keys(s, {"days", "start"}, "backtest.synthetic");
    read(s, "days", b.synthetic_days, "backtest.synthetic");
    if (s.contains("start")) b.synthetic_start = read_date(s, "start", "backtest.synthetic");
    if (b.synthetic_days < 2) throw ConfigError("backtest.synthetic.days must be >= 2");
  }
  return b;
}

FigureSettings parse_figures(const json& j) {
  const std::string where = "figures";
  check_keys(j, {"potential_delta", "phase_gamma", "phase_delta", "fig3_days", "fig4_days",
                 "fig7_days", "smooth_min_period"},
             where);
  FigureSettings f;
  read(j, "potential_delta", f.potential_delta, where);
  read(j, "phase_gamma", f.phase_gamma, where);
  read(j, "phase_delta", f.phase_delta, where);
  read(j, "fig3_days", f.fig3_days, where);
  read(j, "fig4_days", f.fig4_days, where);
  read(j, "fig7_days", f.fig7_days, where);
  read(j, "smooth_min_period", f.smooth_min_period, where);
  return f;
}

// ---- output helpers ------------------------------------------------------

std::string prepare_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
  return out_dir;
}

std::string write_csv(const RunConfig& cfg, const std::string& dir, const std::string& name,
                      CsvTable table) {
  table.comments.insert(table.comments.begin(), " " + provenance(cfg));
  const std::string path = (fs::path(dir) / name).string();
  write_text_file(path, render_csv(table));
  return path;
}

std::string write_json(const std::string& dir, const std::string& name, const json& j) {
  const std::string path = (fs::path(dir) / name).string();
  write_text_file(path, j.dump(2) + "\n");
  return path;
}

json provenance_json(const RunConfig& cfg) {
  return {{"version", kVersion}, {"config_hash", cfg.hash}, {"seed", cfg.seed}};
}

std::string month_label(int key) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", key / 12, key % 12 + 1);
  return buf;
}

json report_json(const std::string& name, const PerformanceReport& r) {
  json months = json::array();
  for (int m : r.monthly.months) months.push_back(month_label(m));
  return {{"name", name},
          {"mean_return", r.mean_return},
          {"volatility", r.volatility},
          {"max_drawdown", r.max_drawdown},
          {"var_5", r.var_5},
          {"gross_exposure", r.gross_exposure},
          {"alpha", r.alpha},
          {"beta", r.beta},
          {"sharpe_ratio", r.sharpe_ratio},
          {"sortino_ratio", r.sortino_ratio},
          {"holding_period", r.holding_period},
          {"months", months},
          {"monthly_returns", r.monthly.returns}};
}

const char* stability_name(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    default: return "marginal";
  }
}

const char* kind_name(PointKind k) {
  switch (k) {
    case PointKind::node: return "node";
    case PointKind::focus: return "focus";
    case PointKind::saddle: return "saddle";
    default: return "unnamed";
  }
}

std::vector<double> grid(double lo, double hi, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
  return g;
}

// Stationary points of U on the grid, refined by bisection on U'.
json potential_extrema(const OscillatorDecomposition& osc, const std::vector<double>& g) {
  json minima = json::array(), maxima = json::array();
  for (std::size_t k = 1; k < g.size(); ++k) {
    double a = g[k - 1], b = g[k];
    const double fa = osc.potential_slope(a), fb = osc.potential_slope(b);
    if (!((fa < 0.0 && fb >= 0.0) || (fa > 0.0 && fb <= 0.0))) continue;
    const bool is_min = fa < 0.0;
    for (int it = 0; it < 100; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = osc.potential_slope(m);
      if ((fm < 0.0) == is_min) a = m; else b = m;
    }
    const double s = 0.5 * (a + b);
    json point = {{"s", s}, {"U", osc.potential(s)}};
    (is_min ? minima : maxima).push_back(point);
  }
  return {{"minima", minima}, {"maxima", maxima}};
}

struct DataSet {
  InformationSeries info;
  std::optional<PriceSeries> prices;
};

DataSet load_data(const RunConfig& cfg, bool need_prices) {
  if (!cfg.information_path) throw ConfigError("no information series given (data.information or --information)");
  if (need_prices && !cfg.prices_path) throw ConfigError("no price series given (data.prices or --prices)");
  DataSet d;
  d.info = information_from_csv(parse_csv(read_text_file(*cfg.information_path), *cfg.information_path),
                                *cfg.information_path);
  if (cfg.prices_path) {
    d.prices = prices_from_csv(parse_csv(read_text_file(*cfg.prices_path), *cfg.prices_path),
                               *cfg.prices_path);
  }
  return d;
}

struct Market {
  StatePath states;
  PriceSeries prices;
};

Market empirical_market(const RunConfig& cfg, const InformationSeries& info, const PriceSeries& prices) {
  const auto table = compute_sentiments(info, cfg.params, cfg.initial_sentiment);
  const auto aligned = align_dates(table.dates, prices.dates);
  Market m;
  for (std::size_t q = 0; q < aligned.left.size(); ++q) {
    const std::size_t k = aligned.left[q];
    const std::size_t r = aligned.right[q];
    m.states.dates.push_back(table.dates[k]);
    m.states.states.push_back({0.0, table.h[k], table.levels[k], 0.0});
    m.prices.dates.push_back(prices.dates[r]);
    m.prices.open.push_back(prices.open[r]);
    m.prices.close.push_back(prices.close[r]);
  }
  if (m.prices.size() < 2) throw DataError("backtest: information and price dates barely overlap");
  return m;
}

Market synthetic(const RunConfig& cfg) {
  SimulationConfig sim = cfg.simulation;
  sim.horizon = static_cast<double>(cfg.backtest.synthetic_days - 1);
  sim.output_stride = 1.0;
  sim.validate();
  auto mk = synthetic_market(simulate(sim), cfg.backtest.synthetic_start);
  return {std::move(mk.states), std::move(mk.prices)};
}

PositionSeries slice(const PositionSeries& p, std::size_t from) {
  PositionSeries out;
  out.name = p.name;
  out.dates.assign(p.dates.begin() + static_cast<std::ptrdiff_t>(from), p.dates.end());
  out.position.assign(p.position.begin() + static_cast<std::ptrdiff_t>(from), p.position.end());
  return out;
}

PriceSeries slice(const PriceSeries& p, std::size_t from) {
  const auto off = static_cast<std::ptrdiff_t>(from);
  PriceSeries out;
  out.dates.assign(p.dates.begin() + off, p.dates.end());
  out.open.assign(p.open.begin() + off, p.open.end());
  out.close.assign(p.close.begin() + off, p.close.end());
  return out;
}

CsvTable monthly_table(const std::vector<std::string>& names, const std::vector<MonthlyReturns>& m,
                       std::size_t window) {
  CsvTable t;
  t.header = {"month"};
  for (const auto& n : names) t.header.push_back(n);
  const auto& months = m.front().months;
  std::vector<double> cum(m.size(), 0.0);
  for (std::size_t k = 0; k < months.size(); ++k) {
    if (window > 0 && k + 1 < window) continue;
    std::vector<std::string> row{month_label(months[k])};
    for (std::size_t c = 0; c < m.size(); ++c) {
      double v = 0.0;
      if (window == 0) {
        cum[c] += m[c].returns[k];
        v = cum[c];
      } else {
        for (std::size_t j = k + 1 - window; j <= k; ++j) v += m[c].returns[j];
      }
      row.push_back(format_double(v));
    }
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace

// ---- configuration -------------------------------------------------------

std::string config_hash(const json& j) {
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string provenance(const RunConfig& config) {
  return std::string("hetmarket ") + kVersion + " config_hash=" + config.hash +
         " seed=" + std::to_string(config.seed);
}

RunConfig load_config(const json& j, std::optional<std::uint64_t> seed_override,
                      const std::string& base_dir) {
  check_keys(j, {"seed", "model", "system", "noise", "simulation", "analysis", "data", "calibration",
                 "backtest", "figures"},
             "config");
  RunConfig cfg;
  cfg.raw = j;
  cfg.hash = config_hash(j);
  read(j, "seed", cfg.seed, "config");
  if (seed_override) cfg.seed = *seed_override;

  cfg.params = parse_model(j.value("model", json::object()));
  std::string system = "reduced";
  read(j, "system", system, "config");
  if (system == "reduced") {
    cfg.system = SystemKind::reduced;
  } else if (system == "full") {
    cfg.system = SystemKind::full;
  } else {
    throw ConfigError("config.system: expected 'reduced' or 'full'");
  }
  const auto noise = parse_noise(j.contains("noise") ? j.at("noise") : json(), cfg.seed);
  cfg.simulation = parse_simulation(j.value("simulation", json::object()), cfg.params, cfg.system, noise);
  cfg.analysis = parse_analysis(j.value("analysis", json::object()), cfg.params);

  if (j.contains("data")) {
    const json& d = j.at("data");
    check_keys(d, {"information", "prices"}, "data");
    std::string path;
    if (read(d, "information", path, "data")) cfg.information_path = resolve(base_dir, path);
    if (read(d, "prices", path, "data")) cfg.prices_path = resolve(base_dir, path);
  }
  if (j.contains("calibration")) {
    const json& c = j.at("calibration");
    check_keys(c, {"burn_in", "min_overlap", "initial_s"}, "calibration");
    read(c, "burn_in", cfg.fit.burn_in, "calibration");
    read(c, "min_overlap", cfg.fit.min_overlap, "calibration");
    read(c, "initial_s", cfg.initial_sentiment, "calibration");
    if (!cfg.initial_sentiment.empty() && cfg.initial_sentiment.size() != cfg.params.groups()) {
      throw ConfigError("calibration.initial_s: one value per group required");
    }
  }
  cfg.backtest = parse_backtest(j.value("backtest", json::object()));
  cfg.figures = parse_figures(j.value("figures", json::object()));
  return cfg;
}

// ---- commands ------------------------------------------------------------

std::vector<std::string> cmd_simulate(const RunConfig& config, const std::string& out_dir) {
  const auto dir = prepare_dir(out_dir);
  const Trajectory traj = simulate(config.simulation);
  json summary = {{"provenance", provenance_json(config)},
                  {"dt", traj.dt},
                  {"samples", traj.states.size()},
                  {"max_abs_sentiment", traj.max_abs_sentiment},
                  {"max_abs_information", traj.max_abs_information},
                  {"warnings", traj.warnings}};
  return {write_csv(config, dir, "trajectory.csv", trajectory_table(traj)),
          write_json(dir, "simulation.json", summary)};
}

std::vector<std::string> cmd_analyze(const RunConfig& config, const std::string& out_dir) {
  const auto dir = prepare_dir(out_dir);
  const auto& p = config.params;
  const auto& a = config.analysis;
  const auto osc = decompose(p, a.group, a.convention);
  const auto s_grid = grid(a.s_min, a.s_max, a.points);

  CsvTable pot;
  pot.header = {"s", "U", "G", "isocline_h"};
  for (double s : s_grid) {
    pot.add_row({format_double(s), format_double(osc.potential(s)), format_double(osc.damping(s)),
                 format_double(isocline(s, p))});
  }
  CsvTable surface;
  surface.header = {"s", "s_rate", "E"};
  for (double s : s_grid) {
    for (double v : grid(-a.rate_max, a.rate_max, a.rate_points)) {
      surface.add_row({format_double(s), format_double(v), format_double(osc.energy(s, v))});
    }
  }

  json groups = json::array();
  for (std::size_t i = 0; i < p.groups(); ++i) {
    groups.push_back({{"tau", p.tau[i]}, {"critical_gamma", critical_gamma_for_group(i, p)}});
  }
  const auto eq = find_equilibria(p);
  constexpr std::size_t kMaxListed = 512;
  json points = json::array();
  for (std::size_t k = 0; k < eq.size() && k < kMaxListed; ++k) {
    json eig = json::array();
    for (auto z : eq[k].eigenvalues) eig.push_back({z.real(), z.imag()});
    points.push_back({{"s", eq[k].s},
                      {"h", eq[k].h},
                      {"stability", stability_name(eq[k].stability)},
                      {"kind", kind_name(eq[k].kind)},
                      {"eigenvalues", eig},
                      {"residual", eq[k].residual}});
  }
  json out = {{"provenance", provenance_json(config)},
              {"quartic", a.convention == QuarticConvention::published ? "published" : "series_consistent"},
              {"group", a.group},
              {"gamma", p.gamma},
              {"gamma_bar", p.gamma_bar()},
              {"critical_gamma", critical_gamma(p)},
              {"groups", groups},
              {"potential", potential_extrema(osc, s_grid)},
              {"potential_coefficients", {{"u4", osc.u4}, {"u2", osc.u2}, {"u1", osc.u1}}},
              {"damping_coefficients", {{"g0", osc.g0}, {"g1", osc.g1}, {"g2", osc.g2}}},
              {"equilibria_count", eq.size()},
              {"equilibria_truncated", eq.size() > kMaxListed},
              {"equilibria", points}};
  return {write_csv(config, dir, "potential.csv", pot),
          write_csv(config, dir, "energy_surface.csv", surface),
          write_json(dir, "analysis.json", out)};
}

std::vector<std::string> cmd_calibrate(const RunConfig& config, const std::string& out_dir) {
  const auto data = load_data(config, true);
  const auto dir = prepare_dir(out_dir);
  const auto table = compute_sentiments(data.info, config.params, config.initial_sentiment);
  const auto fit = fit_price(table, *data.prices, config.fit);
  double ss = 0.0;
  for (double r : fit.residuals) ss += r * r;
  json out = {{"provenance", provenance_json(config)},
              {"a1", fit.a1},
              {"a2", fit.a2},
              {"drift", fit.drift},
              {"s_star", fit.s_star ? json(*fit.s_star) : json()},
              {"c", fit.c},
              {"correlation", fit.correlation},
              {"residual_rms", std::sqrt(ss / static_cast<double>(fit.residuals.size()))},
              {"observations", fit.dates.size()},
              {"burn_in", config.fit.burn_in},
              {"first_date", fit.first_date.iso()},
              {"last_date", fit.last_date.iso()}};
  return {write_json(dir, "calibration.json", out),
          write_csv(config, dir, "sentiments.csv", sentiment_table(table)),
          write_csv(config, dir, "model_price.csv", model_price_table(model_price(table, fit)))};
}

BacktestRun run_backtest(const RunConfig& config, const StatePath& states, const PriceSeries& prices) {
  if (states.dates != prices.dates) throw DataError("backtest: states and prices are not aligned");
  const auto& bt = config.backtest;
  std::size_t start = bt.warmup;
  if (bt.start) {
    start = static_cast<std::size_t>(std::lower_bound(prices.dates.begin(), prices.dates.end(), *bt.start) -
                                     prices.dates.begin());
  }
  if (start + 2 >= prices.size()) throw DataError("backtest: insufficient history after the warm-up");

  auto all = model_positions(states, config.params, bt.strategies, bt.forecast_substeps);
  all.push_back(momrev_positions(prices));
  all.push_back(buy_and_hold(prices.dates));

  const PriceSeries window = slice(prices, start);
  BacktestRun run;
  for (const auto& p : all) {
    run.positions.push_back(slice(p, start));
    run.pnl.push_back(backtest(run.positions.back(), window));
  }
  const MonthlyReturns bench = monthly_returns(run.pnl.back());
  json strategies = json::array();
  std::vector<std::string> names;
  std::vector<std::vector<double>> monthly;
  for (std::size_t c = 0; c < run.positions.size(); ++c) {
    const auto rep = performance_report(run.pnl[c], run.positions[c], bench);
    strategies.push_back(report_json(run.positions[c].name, rep));
    names.push_back(run.positions[c].name);
    monthly.push_back(rep.monthly.returns);
  }
  json corr = {{"names", names}};
  try {
    corr["matrix"] = correlation_matrix(monthly);
  } catch (const DataError& e) {
    corr["matrix"] = nullptr;
    corr["note"] = e.what();
  }
  run.report = {{"provenance", provenance_json(config)},
                {"evaluation",
                 {{"first_date", window.dates.front().iso()},
                  {"last_date", window.dates.back().iso()},
                  {"days", window.size()}}},
                {"strategies", strategies},
                {"correlations_percent", corr}};
  return run;
}

std::vector<std::string> cmd_backtest(const RunConfig& config, const std::string& out_dir) {
  Market market;
  if (config.information_path || config.prices_path) {
    const auto data = load_data(config, true);
    market = empirical_market(config, data.info, *data.prices);
  } else {
    market = synthetic(config);
  }
  const auto dir = prepare_dir(out_dir);
  const auto run = run_backtest(config, market.states, market.prices);
  return {write_json(dir, "report.json", run.report),
          write_csv(config, dir, "positions.csv", positions_table(run.positions, run.pnl))};
}

std::vector<std::string> cmd_emit_figure_data(const RunConfig& config, const std::string& out_dir) {
  const auto dir = prepare_dir(out_dir);
  const auto& fig = config.figures;
  std::vector<std::string> written;

  // potential well and energy surface of a single group
  {
    ModelParams p = presets::single_group(0.0);
    p.delta = fig.potential_delta;
    const auto osc = decompose(p, 0);
    CsvTable pot, surface;
    pot.header = {"s", "U"};
    surface.header = {"s", "s_rate", "E"};
    for (double s : grid(-0.99, 0.99, 199)) {
      pot.add_row({format_double(s), format_double(osc.potential(s))});
      for (double v : grid(-0.5, 0.5, 41)) {
        surface.add_row({format_double(s), format_double(v), format_double(osc.energy(s, v))});
      }
    }
    written.push_back(write_csv(config, dir, "fig1_potential.csv", pot));
    written.push_back(write_csv(config, dir, "fig1_energy_surface.csv", surface));
  }

  // phase portrait of the single-group market without news
  {
    ModelParams p = presets::single_group(fig.phase_gamma);
    p.delta = fig.phase_delta;
    const double starts[][2] = {{-0.9, -0.5}, {-0.6, 0.0}, {-0.3, 0.2}, {0.2, -0.4}, {0.5, -0.8}, {0.9, 0.6}};
    CsvTable t;
    t.header = {"run", "t", "s", "h"};
    for (std::size_t r = 0; r < std::size(starts); ++r) {
      SimulationConfig sim;
      sim.params = p;
      sim.initial = {0.0, starts[r][1], {starts[r][0]}, 0.0};
      sim.horizon = 60.0;
      sim.output_stride = 0.05;
      for (const auto& st : simulate(sim).states) {
        t.add_row({std::to_string(r + 1), format_double(st.t), format_double(st.s[0]), format_double(st.h)});
      }
    }
    written.push_back(write_csv(config, dir, "fig2a_phase.csv", t));
  }

  auto noisy_run = [&](const ModelParams& p, double days) {
    SimulationConfig sim;
    sim.params = p;
    sim.initial = {0.0, 0.0, std::vector<double>(p.groups(), ordered_sentiment(p.beta1)), 0.0};
    sim.burn_in = kDefaultBurnIn;
    sim.horizon = days;
    NoiseSpec spec = config.simulation.noise.value_or(NoiseSpec{});
    spec.seed = config.seed;
    sim.noise = spec;
    return simulate(sim);
  };
  written.push_back(write_csv(config, dir, "fig3_two_group.csv",
                              trajectory_table(noisy_run(presets::two_group(), fig.fig3_days))));
  written.push_back(write_csv(config, dir, "fig4_nine_group.csv",
                              trajectory_table(noisy_run(presets::nine_group(), fig.fig4_days))));

  // isocline and fast/slow trajectories
  {
    const ModelParams p = presets::fast_slow();
    CsvTable iso;
    iso.header = {"s", "h"};
    for (double s : grid(-0.99, 0.99, 199)) iso.add_row({format_double(s), format_double(isocline(s, p))});
    written.push_back(write_csv(config, dir, "fig7_isocline.csv", iso));
    const double starts[][3] = {{-0.9, 0.5, 0.2}, {0.9, -0.5, -0.2}, {0.0, 0.1, -0.3}, {0.5, -0.2, 0.4}};
    CsvTable t;
    t.header = {"run", "t", "s_1", "s_2", "h"};
    for (std::size_t r = 0; r < std::size(starts); ++r) {
      SimulationConfig sim;
      sim.params = p;
      sim.initial = {0.0, starts[r][2], {starts[r][0], starts[r][1]}, 0.0};
      sim.horizon = fig.fig7_days;
      sim.output_stride = 0.01;
      sim.dt = 0.0005;
      for (const auto& st : simulate(sim).states) {
        t.add_row({std::to_string(r + 1), format_double(st.t), format_double(st.s[0]),
                   format_double(st.s[1]), format_double(st.h)});
      }
    }
    written.push_back(write_csv(config, dir, "fig7_trajectories.csv", t));
  }

  if (!config.information_path) return written;

  // empirical figures
  const auto data = load_data(config, false);
  const auto table = compute_sentiments(data.info, config.params, config.initial_sentiment);
  written.push_back(write_csv(config, dir, "fig6_sentiments.csv", sentiment_table(table)));
  if (table.size() >= 4) {
    const auto s_smooth = fourier_smooth(table.aggregate, fig.smooth_min_period);
    const auto h_smooth = fourier_smooth(table.h, fig.smooth_min_period);
    CsvTable t;
    t.header = {"date", "s_smooth", "h_smooth"};
    for (std::size_t k = 0; k < table.size(); ++k) {
      t.add_row({table.dates[k].iso(), format_double(s_smooth[k]), format_double(h_smooth[k])});
    }
    written.push_back(write_csv(config, dir, "fig2b_phase.csv", t));
  }
  if (!data.prices) return written;

  const auto fit = fit_price(table, *data.prices, config.fit);
  const auto model = model_price(table, fit);
  const auto aligned = align_dates(model.dates, data.prices->dates);
  CsvTable series;
  series.header = {"date", "h", "s_agg", "p_model", "log_close"};
  const std::size_t origin = table.size() - model.dates.size();
  for (std::size_t q = 0; q < aligned.left.size(); ++q) {
    const std::size_t k = aligned.left[q];
    series.add_row({model.dates[k].iso(), format_double(table.h[origin + k]),
                    format_double(table.aggregate[origin + k]), format_double(model.log_price[k]),
                    format_double(std::log(data.prices->close[aligned.right[q]]))});
  }
  written.push_back(write_csv(config, dir, "fig5_series.csv", series));

  const auto market = empirical_market(config, data.info, *data.prices);
  const auto run = run_backtest(config, market.states, market.prices);
  std::vector<std::string> names;
  std::vector<MonthlyReturns> monthly;
  for (std::size_t c = 0; c < run.pnl.size(); ++c) {
    names.push_back(run.positions[c].name);
    monthly.push_back(monthly_returns(run.pnl[c]));
  }
  written.push_back(write_csv(config, dir, "fig8_cumulative.csv", monthly_table(names, monthly, 0)));
  written.push_back(write_csv(config, dir, "fig8_rolling_3y.csv", monthly_table(names, monthly, 36)));
  return written;
}

// ---- entry point ---------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heterogeneous news-driven market model"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string info_path, price_path;
  const char* names[] = {"simulate", "analyze", "calibrate", "backtest", "emit-figure-data"};
  const char* about[] = {"integrate the market model and write the trajectory",
                         "oscillator analysis: potential, damping, equilibria, critical feedback",
                         "fit the price equation to an information and a price series",
                         "backtest the forecast strategies against Mom-Rev and buy-and-hold",
                         "write figure-ready data tables"};
  for (std::size_t k = 0; k < std::size(names); ++k) {
    auto* sub = app.add_subcommand(names[k], about[k]);
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    if (k >= 2) {
      sub->add_option("--information", info_path, "CSV with header date,h");
      sub->add_option("--prices", price_path, "CSV with header date,open,close");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    json cfg_json = json::object();
    std::string base_dir;
    if (!config_path.empty()) {
      try {
        cfg_json = json::parse(read_text_file(config_path));
      } catch (const json::parse_error& e) {
        throw ConfigError(config_path + ": " + e.what());
      } catch (const DataError& e) {
        throw ConfigError(e.what());
      }
      base_dir = fs::path(config_path).parent_path().string();
    }
    RunConfig cfg = load_config(cfg_json, seed, base_dir);
    if (!info_path.empty()) cfg.information_path = info_path;
    if (!price_path.empty()) cfg.prices_path = price_path;

    std::vector<std::string> files;
    if (command == "simulate") files = cmd_simulate(cfg, out_dir);
    else if (command == "analyze") files = cmd_analyze(cfg, out_dir);
    else if (command == "calibrate") files = cmd_calibrate(cfg, out_dir);
    else if (command == "backtest") files = cmd_backtest(cfg, out_dir);
    else files = cmd_emit_figure_data(cfg, out_dir);
    for (const auto& f : files) out << f << "\n";
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace hetmarket::cli
