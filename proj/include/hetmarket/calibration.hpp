#pragma once

// Empirical pipeline: sentiments from a measured information series, the
// least-squares fit of the price-formation equation, and Fourier smoothing.

#include <optional>
#include <span>
#include <vector>

#include "hetmarket/model.hpp"
#include "hetmarket/series.hpp"

namespace hetmarket {

/// Low-pass filter: drops every discrete Fourier harmonic whose period is
/// below `min_period` samples. The mean is kept.
std::vector<double> fourier_smooth(std::span<const double> series, double min_period);

/// Daily group sentiments and their aggregate.
struct SentimentTable {
  std::vector<Date> dates;
  std::vector<std::vector<double>> levels;  ///< levels[k][i]
  std::vector<double> aggregate;
  std::vector<double> h;                    ///< the driving information series

  std::size_t size() const noexcept { return dates.size(); }
  std::size_t groups() const noexcept { return levels.empty() ? 0 : levels.front().size(); }
};

/// Integrates the group sentiment equations driven by the measured h. The
/// initial sentiments default to zero.
SentimentTable compute_sentiments(const InformationSeries& info, const ModelParams& params,
                                  std::span<const double> initial = {});

struct FitOptions {
  /// Leading rows of the sentiment table excluded from the fit.
  std::size_t burn_in = 250;
  std::size_t min_overlap = 100;
};

struct CalibrationResult {
  double a1 = 0.0;
  double a2 = 0.0;
  double drift = 0.0;               ///< b = a2 * s_star
  std::optional<double> s_star;     ///< undefined when a2 <= 1e-12
  double c = 0.0;                   ///< integration constant
  double correlation = 0.0;         ///< fitted path vs observed log close
  std::vector<Date> dates;          ///< observations used
  std::vector<double> residuals;    ///< observed - fitted, per used date
  Date first_date;                  ///< origin of the time index and cumulative sum
  Date last_date;
};

/// Fits p_k = a1 s_k + a2 sum_{j<k} s_j - b k + c on the overlap of the
/// sentiment table (after burn-in) and the price series, with k the
/// business-day index from the first fitted row. Throws DegenerateFitError
/// when the design lacks full column rank.
CalibrationResult fit_price(const SentimentTable& table, const PriceSeries& prices,
                            const FitOptions& options = {});

struct ModelPricePath {
  std::vector<Date> dates;
  std::vector<double> log_price;
};

/// Evaluates the fitted discrete price path on every table row from
/// result.first_date on.
ModelPricePath model_price(const SentimentTable& table, const CalibrationResult& result);

/// Evaluates p_k = a1 s_k + a2 sum_{j<k}(s_j - s_star) + c on a raw aggregate
/// sentiment series.
std::vector<double> price_path(std::span<const double> aggregate, double a1, double a2,
                               double s_star, double c);

/// Pearson correlation. Throws DataError when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace hetmarket
