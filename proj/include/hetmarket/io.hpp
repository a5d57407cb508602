#pragma once

// CSV tables: parsing, rendering, and the typed series readers/writers used by
// the command-line tool.

#include <string>
#include <string_view>
#include <vector>

#include "hetmarket/calibration.hpp"
#include "hetmarket/series.hpp"
#include "hetmarket/simulation.hpp"
#include "hetmarket/strategy.hpp"

namespace hetmarket {

/// 9 significant digits, the format of every float written to disk.
std::string format_double(double value);

struct CsvTable {
  std::vector<std::string> comments;  ///< leading '#' lines, without the '#'
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;     ///< source line of each row (1-based)

  void add_row(std::vector<std::string> row) {
    rows.push_back(std::move(row));
    lines.push_back(0);
  }
};

/// Comma-separated, first non-comment line is the header. Blank lines are
/// skipped. Rows with the wrong field count raise DataError with their line
/// numbers.
CsvTable parse_csv(std::string_view text, std::string_view source = "csv");
std::string render_csv(const CsvTable& table);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

/// Requires the header `date,h`. Every bad line is listed in the error.
InformationSeries information_from_csv(const CsvTable& table, std::string_view source = "csv");
/// Requires the header `date,open,close`.
PriceSeries prices_from_csv(const CsvTable& table, std::string_view source = "csv");

CsvTable information_table(const InformationSeries& info);
CsvTable price_table(const PriceSeries& prices);
/// t,h,s_1..s_N,s_agg,p
CsvTable trajectory_table(const Trajectory& trajectory);
/// date,s_1..s_N,s_agg
CsvTable sentiment_table(const SentimentTable& table);
/// date,p_model
CsvTable model_price_table(const ModelPricePath& path);
/// date,<name>_position...,<name>_pnl...
CsvTable positions_table(const std::vector<PositionSeries>& positions,
                         const std::vector<DailyPnl>& pnl);

/// Numeric view of a table; throws DataError on a non-numeric cell.
std::vector<std::vector<double>> numeric_rows(const CsvTable& table, std::size_t first_column = 0);

}  // namespace hetmarket
