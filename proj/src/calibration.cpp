#include "hetmarket/calibration.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numeric>

#include "hetmarket/errors.hpp"
#include "hetmarket/simulation.hpp"

namespace hetmarket {

std::vector<double> fourier_smooth(std::span<const double> series, double min_period) {
  const std::size_t n = series.size();
  if (n < 4) throw DataError("fourier_smooth: series needs at least 4 samples");
  if (!(min_period >= 2.0)) throw ConfigError("fourier_smooth: min_period must be >= 2");

  const std::size_t bins = n / 2 + 1;
  std::vector<double> buffer(series.begin(), series.end());
  std::vector<std::complex<double>> spectrum(bins);
  auto* raw_spec = reinterpret_cast<fftw_complex*>(spectrum.data());
  const int len = static_cast<int>(n);

  using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, decltype(&fftw_destroy_plan)>;
  {
    Plan forward(fftw_plan_dft_r2c_1d(len, buffer.data(), raw_spec, FFTW_ESTIMATE),
                 &fftw_destroy_plan);
    fftw_execute(forward.get());
  }
  // Harmonic k has period n / k samples.
  const double cutoff = static_cast<double>(n) / min_period;
  for (std::size_t k = 1; k < bins; ++k) {
    if (static_cast<double>(k) > cutoff) spectrum[k] = 0.0;
  }
  {
    Plan inverse(fftw_plan_dft_c2r_1d(len, raw_spec, buffer.data(), FFTW_ESTIMATE),
                 &fftw_destroy_plan);
    fftw_execute(inverse.get());
  }
  for (double& v : buffer) v /= static_cast<double>(n);
  return buffer;
}

SentimentTable compute_sentiments(const InformationSeries& info, const ModelParams& params,
                                  std::span<const double> initial) {
  info.validate();
  std::vector<double> start(params.groups(), 0.0);
  if (!initial.empty()) {
    if (initial.size() != params.groups()) {
      throw ConfigError("compute_sentiments: initial sentiment vector has the wrong length");
    }
    start.assign(initial.begin(), initial.end());
  }
  auto paths = drive_with_information(info.h, params, start);
  SentimentTable table;
  table.dates = info.dates;
  table.levels = std::move(paths.levels);
  table.aggregate = std::move(paths.aggregate);
  table.h = info.h;
  return table;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DataError("pearson: need two equal series");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DataError("pearson: zero-variance series");
  return sxy / std::sqrt(sxx * syy);
}

CalibrationResult fit_price(const SentimentTable& table, const PriceSeries& prices,
                            const FitOptions& options) {
  prices.validate();
  if (table.aggregate.size() != table.dates.size()) {
    throw DataError("fit_price: sentiment table is inconsistent");
  }
  if (options.burn_in >= table.size()) throw DataError("fit_price: burn-in covers the whole table");
  const std::size_t origin = options.burn_in;

  const std::vector<Date> window(table.dates.begin() + static_cast<std::ptrdiff_t>(origin),
                                 table.dates.end());
  const auto aligned = align_dates(window, prices.dates);
  const std::size_t m = aligned.left.size();
  if (m < options.min_overlap || m < 5) {
    throw DataError("fit_price: only " + std::to_string(m) + " overlapping dates");
  }

  // cumulative[r] = sum of aggregate over window rows before r
  std::vector<double> cumulative(window.size(), 0.0);
  for (std::size_t r = 1; r < window.size(); ++r) {
    cumulative[r] = cumulative[r - 1] + table.aggregate[origin + r - 1];
  }

  Eigen::MatrixXd design(static_cast<Eigen::Index>(m), 4);
  Eigen::VectorXd target(static_cast<Eigen::Index>(m));
  for (std::size_t q = 0; q < m; ++q) {
    const std::size_t r = aligned.left[q];
    const auto row = static_cast<Eigen::Index>(q);
    design(row, 0) = table.aggregate[origin + r];
    design(row, 1) = cumulative[r];
    design(row, 2) = -static_cast<double>(r);
    design(row, 3) = 1.0;
    target(row) = std::log(prices.close[aligned.right[q]]);
  }

  Eigen::Vector4d scale;
  for (int c = 0; c < 4; ++c) {
    scale(c) = design.col(c).norm();
    if (!(scale(c) > 0.0)) throw DegenerateFitError("fit_price: a design column is identically zero");
  }
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-10);
  if (qr.rank() < 4) {
    throw DegenerateFitError("fit_price: design matrix is rank deficient (sentiment carries no signal)");
  }
  const Eigen::Vector4d coef = qr.solve(target).cwiseQuotient(scale);

  CalibrationResult res;
  res.a1 = coef(0);
  res.a2 = coef(1);
  res.drift = coef(2);
  res.c = coef(3);
  if (res.a2 > 1e-12) res.s_star = res.drift / res.a2;

  const Eigen::VectorXd fitted = design * coef;
  res.dates.reserve(m);
  res.residuals.resize(m);
  std::vector<double> fit_v(m), obs_v(m);
  for (std::size_t q = 0; q < m; ++q) {
    const auto row = static_cast<Eigen::Index>(q);
    res.dates.push_back(window[aligned.left[q]]);
    res.residuals[q] = target(row) - fitted(row);
    fit_v[q] = fitted(row);
    obs_v[q] = target(row);
  }
  res.correlation = pearson(fit_v, obs_v);
  res.first_date = window.front();
  res.last_date = res.dates.back();
  return res;
}

ModelPricePath model_price(const SentimentTable& table, const CalibrationResult& result) {
  const auto it = std::lower_bound(table.dates.begin(), table.dates.end(), result.first_date);
  if (it == table.dates.end() || *it != result.first_date) {
    throw DataError("model_price: table does not contain the calibration origin");
  }
  const auto origin = static_cast<std::size_t>(it - table.dates.begin());
  ModelPricePath path;
  double cumulative = 0.0;
  for (std::size_t r = origin; r < table.size(); ++r) {
    const double k = static_cast<double>(r - origin);
    path.dates.push_back(table.dates[r]);
    path.log_price.push_back(result.a1 * table.aggregate[r] + result.a2 * cumulative -
                             result.drift * k + result.c);
    cumulative += table.aggregate[r];
  }
  return path;
}

std::vector<double> price_path(std::span<const double> aggregate, double a1, double a2,
                               double s_star, double c) {
  std::vector<double> p(aggregate.size());
  double cumulative = 0.0;
  for (std::size_t k = 0; k < aggregate.size(); ++k) {
    p[k] = a1 * aggregate[k] + a2 * cumulative + c;
    cumulative += aggregate[k] - s_star;
  }
  return p;
}

}  // namespace hetmarket
