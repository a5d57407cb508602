#include "hetmarket/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hetmarket/errors.hpp"

namespace hetmarket {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

namespace {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
    std::size_t lead = 0;
    while (lead < f.size() && (f[lead] == ' ' || f[lead] == '\t')) ++lead;
    f.erase(0, lead);
  }
  return out;
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && errno != ERANGE;
}

class ErrorList {
 public:
  explicit ErrorList(std::string_view source) : source_(source) {}
  void add(std::size_t line, const std::string& what) {
    ++count_;
    if (count_ <= 20) text_ += "\n  " + source_ + ":" + std::to_string(line) + ": " + what;
  }
  void raise_if_any() const {
    if (count_ == 0) return;
    std::string msg = source_ + ": " + std::to_string(count_) + " invalid line(s)" + text_;
    if (count_ > 20) msg += "\n  ...";
    throw DataError(msg);
  }

 private:
  std::string source_;
  std::string text_;
  std::size_t count_ = 0;
};

void expect_header(const CsvTable& t, const std::vector<std::string>& want, std::string_view source) {
  if (t.header != want) {
    std::string w;
    for (const auto& c : want) w += (w.empty() ? "" : ",") + c;
    throw DataError(std::string(source) + ": expected header '" + w + "'");
  }
}

std::size_t line_of(const CsvTable& t, std::size_t row) {
  return row < t.lines.size() ? t.lines[row] : row + 2;
}

}  // namespace

CsvTable parse_csv(std::string_view text, std::string_view source) {
  CsvTable table;
  ErrorList errors(source);
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (!have_header) table.comments.emplace_back(line.substr(1));
      continue;
    }
    auto fields = split(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      errors.add(line_no, "expected " + std::to_string(table.header.size()) + " fields, found " +
                              std::to_string(fields.size()));
      continue;
    }
    table.rows.push_back(std::move(fields));
    table.lines.push_back(line_no);
  }
  if (!have_header) throw DataError(std::string(source) + ": missing header");
  errors.raise_if_any();
  return table;
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  for (const auto& c : table.comments) out += "#" + c + "\n";
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (k) out += ',';
      out += fields[k];
    }
    out += '\n';
  };
  emit(table.header);
  for (const auto& r : table.rows) emit(r);
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

InformationSeries information_from_csv(const CsvTable& table, std::string_view source) {
  expect_header(table, {"date", "h"}, source);
  InformationSeries info;
  ErrorList errors(source);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto line = line_of(table, r);
    double h = 0.0;
    try {
      const Date d = Date::parse(row[0]);
      if (!info.dates.empty() && !(info.dates.back() < d)) {
        errors.add(line, "date " + row[0] + " is not after the previous date");
        continue;
      }
      if (!parse_number(row[1], h) || !std::isfinite(h)) {
        errors.add(line, "h '" + row[1] + "' is not a number");
        continue;
      }
      if (std::abs(h) > 1.0) {
        errors.add(line, "h = " + row[1] + " outside [-1, 1]");
        continue;
      }
      info.dates.push_back(d);
      info.h.push_back(h);
    } catch (const DataError&) {
      errors.add(line, "malformed date '" + row[0] + "'");
    }
  }
  errors.raise_if_any();
  if (info.dates.empty()) throw DataError(std::string(source) + ": no data rows");
  return info;
}

PriceSeries prices_from_csv(const CsvTable& table, std::string_view source) {
  expect_header(table, {"date", "open", "close"}, source);
  PriceSeries prices;
  ErrorList errors(source);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto line = line_of(table, r);
    try {
      const Date d = Date::parse(row[0]);
      if (!prices.dates.empty() && !(prices.dates.back() < d)) {
        errors.add(line, "date " + row[0] + " is not after the previous date");
        continue;
      }
      double o = 0.0, c = 0.0;
      if (!parse_number(row[1], o) || !parse_number(row[2], c) || !(o > 0.0) || !(c > 0.0) ||
          !std::isfinite(o) || !std::isfinite(c)) {
        errors.add(line, "prices must be positive numbers");
        continue;
      }
      prices.dates.push_back(d);
      prices.open.push_back(o);
      prices.close.push_back(c);
    } catch (const DataError&) {
      errors.add(line, "malformed date '" + row[0] + "'");
    }
  }
  errors.raise_if_any();
  if (prices.dates.empty()) throw DataError(std::string(source) + ": no data rows");
  return prices;
}

CsvTable information_table(const InformationSeries& info) {
  CsvTable t;
  t.header = {"date", "h"};
  for (std::size_t k = 0; k < info.dates.size(); ++k) {
    t.add_row({info.dates[k].iso(), format_double(info.h[k])});
  }
  return t;
}

CsvTable price_table(const PriceSeries& prices) {
  CsvTable t;
  t.header = {"date", "open", "close"};
  for (std::size_t k = 0; k < prices.size(); ++k) {
    t.add_row({prices.dates[k].iso(), format_double(prices.open[k]), format_double(prices.close[k])});
  }
  return t;
}

CsvTable trajectory_table(const Trajectory& trajectory) {
  CsvTable t;
  const std::size_t n = trajectory.params.groups();
  t.header = {"t", "h"};
  for (std::size_t i = 0; i < n; ++i) t.header.push_back("s_" + std::to_string(i + 1));
  t.header.push_back("s_agg");
  t.header.push_back("p");
  for (const auto& st : trajectory.states) {
    std::vector<std::string> row{format_double(st.t), format_double(st.h)};
    for (double v : st.s) row.push_back(format_double(v));
    row.push_back(format_double(aggregate_sentiment(st.s, trajectory.params.tau)));
    row.push_back(format_double(st.p));
    t.add_row(std::move(row));
  }
  return t;
}

CsvTable sentiment_table(const SentimentTable& table) {
  CsvTable t;
  t.header = {"date"};
  for (std::size_t i = 0; i < table.groups(); ++i) t.header.push_back("s_" + std::to_string(i + 1));
  t.header.push_back("s_agg");
  for (std::size_t k = 0; k < table.size(); ++k) {
    std::vector<std::string> row{table.dates[k].iso()};
    for (double v : table.levels[k]) row.push_back(format_double(v));
    row.push_back(format_double(table.aggregate[k]));
    t.add_row(std::move(row));
  }
  return t;
}

CsvTable model_price_table(const ModelPricePath& path) {
  CsvTable t;
  t.header = {"date", "p_model"};
  for (std::size_t k = 0; k < path.dates.size(); ++k) {
    t.add_row({path.dates[k].iso(), format_double(path.log_price[k])});
  }
  return t;
}

CsvTable positions_table(const std::vector<PositionSeries>& positions,
                         const std::vector<DailyPnl>& pnl) {
  if (positions.size() != pnl.size() || positions.empty()) {
    throw DataError("positions table: mismatched inputs");
  }
  CsvTable t;
  t.header = {"date"};
  for (const auto& p : positions) t.header.push_back(p.name + "_position");
  for (const auto& p : positions) t.header.push_back(p.name + "_pnl");
  const auto& dates = positions.front().dates;
  for (std::size_t c = 0; c < positions.size(); ++c) {
    if (positions[c].dates != dates || pnl[c].dates != dates) {
      throw DataError("positions table: series are not aligned");
    }
  }
  for (std::size_t k = 0; k < dates.size(); ++k) {
    std::vector<std::string> row{dates[k].iso()};
    for (const auto& p : positions) row.push_back(std::to_string(p.position[k]));
    for (const auto& p : pnl) row.push_back(format_double(p.pnl[k]));
    t.add_row(std::move(row));
  }
  return t;
}

std::vector<std::vector<double>> numeric_rows(const CsvTable& table, std::size_t first_column) {
  std::vector<std::vector<double>> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<double> row;
    for (std::size_t c = first_column; c < table.rows[r].size(); ++c) {
      double v = 0.0;
      const auto& cell = table.rows[r][c];
      if (cell == "nan") {
        v = std::nan("");
      } else if (!parse_number(cell, v)) {
        throw DataError("line " + std::to_string(line_of(table, r)) + ": '" + cell + "' is not a number");
      }
      row.push_back(v);
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace hetmarket
