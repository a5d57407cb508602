#pragma once

// Command-line front end: JSON run configuration and the subcommands
// simulate | analyze | calibrate | backtest | emit-figure-data.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetmarket/calibration.hpp"
#include "hetmarket/oscillator.hpp"
#include "hetmarket/simulation.hpp"
#include "hetmarket/strategy.hpp"

namespace hetmarket::cli {

inline constexpr const char* kVersion = "0.1.0";

struct AnalysisSettings {
  double s_min = -0.99;
  double s_max = 0.99;
  int points = 199;
  double rate_max = 0.5;
  int rate_points = 51;
  std::size_t group = 0;
  QuarticConvention convention = QuarticConvention::series_consistent;
};

struct BacktestSettings {
  std::vector<ForecastConfig> strategies = default_strategies();
  std::optional<int> forecast_substeps;
  /// Aligned business days used only to warm up the state before trading.
  std::size_t warmup = 250;
  std::optional<Date> start;
  /// Synthetic market used when no data files are given.
  std::size_t synthetic_days = 5040;
  Date synthetic_start = Date(2000, 1, 3);
};

struct FigureSettings {
  double potential_delta = 0.01;
  double phase_gamma = 1.8;
  double phase_delta = 0.03;
  double fig3_days = 700;
  double fig4_days = 1000;
  double fig7_days = 60;
  double smooth_min_period = 100;
};

struct RunConfig {
  nlohmann::json raw = nlohmann::json::object();
  std::string hash;  ///< FNV-1a of the canonical config text, 16 hex digits
  std::uint64_t seed = 0;

  ModelParams params;
  SystemKind system = SystemKind::reduced;
  SimulationConfig simulation;

  AnalysisSettings analysis;

  std::optional<std::string> information_path;
  std::optional<std::string> prices_path;
  FitOptions fit;
  std::vector<double> initial_sentiment;  ///< empty: zeros

  BacktestSettings backtest;
  FigureSettings figures;
};

/// Builds a run configuration; unknown keys raise ConfigError. Relative data
/// paths are resolved against `base_dir`.
RunConfig load_config(const nlohmann::json& json, std::optional<std::uint64_t> seed_override = {},
                      const std::string& base_dir = "");

std::string config_hash(const nlohmann::json& json);
/// "hetmarket <version> config_hash=<hash> seed=<seed>"
std::string provenance(const RunConfig& config);

/// Each command writes into `out_dir` and returns the written paths.
std::vector<std::string> cmd_simulate(const RunConfig& config, const std::string& out_dir);
std::vector<std::string> cmd_analyze(const RunConfig& config, const std::string& out_dir);
std::vector<std::string> cmd_calibrate(const RunConfig& config, const std::string& out_dir);
std::vector<std::string> cmd_backtest(const RunConfig& config, const std::string& out_dir);
std::vector<std::string> cmd_emit_figure_data(const RunConfig& config, const std::string& out_dir);

/// Report for a set of strategies on a market, plus the Mom-Rev and
/// buy-and-hold benchmarks; used by cmd_backtest.
struct BacktestRun {
  std::vector<PositionSeries> positions;
  std::vector<DailyPnl> pnl;
  nlohmann::json report;
};
BacktestRun run_backtest(const RunConfig& config, const StatePath& states, const PriceSeries& prices);

/// Parses arguments (without the program name), runs the command and returns
/// the exit code: 0 ok, 2 config, 3 data, 4 numerical.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hetmarket::cli
