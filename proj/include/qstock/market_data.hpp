#pragma once

#include <chrono>
#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qstock/types.hpp"

namespace qstock {

using Date = std::chrono::year_month_day;

Date parse_date(std::string_view text);
std::string format_date(Date d);

struct OhlcRow
{
  Date date;
  double open = 0;
  double high = 0;
  double low = 0;
  double close = 0;
  std::int64_t volume = 0;

  bool operator==(OhlcRow const &) const = default;
};

/// Daily bars for one symbol. Construction validates ordering and price
/// consistency, so a live OhlcSeries always satisfies its invariants.
class OhlcSeries
{
public:
  OhlcSeries() = default;
  OhlcSeries(std::string symbol, std::vector<OhlcRow> rows);

  std::string const &symbol() const { return symbol_; }
  std::vector<OhlcRow> const &rows() const { return rows_; }
  Index size() const { return static_cast<Index>(rows_.size()); }

  VectorXd open() const;
  VectorXd high() const;
  VectorXd low() const;
  VectorXd close() const;
  std::vector<Date> dates() const;

private:
  std::string symbol_;
  std::vector<OhlcRow> rows_;
};

/// Raised for malformed CSV input. `row()` is the 1-based line number in the file.
class CsvError : public std::runtime_error
{
public:
  CsvError(std::string const &what, std::size_t row)
    : std::runtime_error(what), row_(row)
  {
  }
  std::size_t row() const { return row_; }

private:
  std::size_t row_;
};

/// Parses `Date,Open,High,Low,Close[,Adj Close],Volume`. Columns are located by
/// header name; `Adj Close` is ignored when present.
OhlcSeries parse_ohlc_csv(std::istream &in, std::string symbol = {});
OhlcSeries parse_ohlc_csv_text(std::string_view text, std::string symbol = {});
std::string write_ohlc_csv(OhlcSeries const &series);

OhlcSeries read_ohlc_file(std::string const &path);
void write_ohlc_file(OhlcSeries const &series, std::string const &path);

class FetchError : public std::runtime_error
{
public:
  enum class Kind
  {
    Network,
    HttpStatus,
    EmptyPayload,
    SymbolNotFound,
    BadPayload,
  };

  FetchError(Kind kind, std::string const &what)
    : std::runtime_error(what), kind_(kind)
  {
  }
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

/// GET `<endpoint>/<symbol>?start=YYYY-MM-DD&end=YYYY-MM-DD`; the body uses the
/// same CSV schema as parse_ohlc_csv. Rows are re-sorted by date and clipped to
/// [start, end].
OhlcSeries fetch_ohlc(std::string const &symbol, Date start, Date end, std::string const &endpoint);

struct GbmParams
{
  Index days = 504;
  double s0 = 100.0;
  double drift = 0.0;
  double volatility = 0.01;
  std::uint64_t seed = 0;
  Date start = Date{std::chrono::year{2020}, std::chrono::month{12}, std::chrono::day{28}};
};

/// Geometric Brownian motion closes on consecutive weekdays; open is the
/// previous close and the high/low wicks extend by a random fraction of the
/// daily volatility.
OhlcSeries generate_gbm_series(GbmParams const &params);

struct MomentumParams
{
  Index days = 509;
  double s0 = 100.0;
  double volatility = 0.01;
  /// AR(1) persistence of the hidden drift.
  double persistence = 0.9;
  /// Stationary standard deviation of the hidden drift, in units of `volatility`.
  double trend_strength = 1.2;
  std::uint64_t seed = 0;
  Date start = Date{std::chrono::year{2020}, std::chrono::month{12}, std::chrono::day{28}};
};

/// Synthetic series with a slowly varying hidden drift, so that recent trend
/// carries information about the next day's direction.
OhlcSeries generate_momentum_series(MomentumParams const &params);

/// labels[t] = 1 iff close[t] < close[t + 1]; the last day has no label.
LabelVector make_labels(OhlcSeries const &series);

} // namespace qstock
