#include "qstock/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "httplib.h"

namespace qstock {

namespace {

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto const pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_number(double v)
{
  char buf[64];
  auto const r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_number(std::string_view text, std::string_view column, std::size_t row)
{
  double v = 0;
  auto const *end = text.data() + text.size();
  auto const r = std::from_chars(text.data(), end, v);
  if (text.empty() || r.ec != std::errc{} || r.ptr != end || !std::isfinite(v)) {
    throw CsvError("malformed number '" + std::string(text) + "' in column " + std::string(column) + " at row " +
                     std::to_string(row),
                   row);
  }
  return v;
}

void check_row(OhlcRow const &r, std::size_t row)
{
  auto fail = [row](std::string const &msg) { throw CsvError(msg + " at row " + std::to_string(row), row); };
  if (!(r.open > 0 && r.high > 0 && r.low > 0 && r.close > 0)) fail("non-positive price");
  if (r.low > r.high) fail("low exceeds high");
  if (r.low > std::min(r.open, r.close)) fail("low exceeds open/close");
  if (r.high < std::max(r.open, r.close)) fail("high below open/close");
  if (r.volume < 0) fail("negative volume");
}

/// Reads rows without enforcing date order. Each row carries its line number.
std::vector<std::pair<OhlcRow, std::size_t>> read_rows(std::istream &in)
{
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw CsvError("missing header row", lineno);

  auto header = split_fields(line);
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].remove_prefix(3);
  auto column = [&](std::string_view name) -> std::ptrdiff_t {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  std::array<std::string_view, 6> const names{"Date", "Open", "High", "Low", "Close", "Volume"};
  std::array<std::ptrdiff_t, 6> idx{};
  for (std::size_t i = 0; i < names.size(); ++i) {
    idx[i] = column(names[i]);
    if (idx[i] < 0) throw CsvError("missing required column " + std::string(names[i]), lineno);
  }

  std::vector<std::pair<OhlcRow, std::size_t>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto const f = split_fields(line);
    if (f.size() != header.size()) {
      throw CsvError("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()) +
                       " at row " + std::to_string(lineno),
                     lineno);
    }
    OhlcRow r;
    try {
      r.date = parse_date(f[idx[0]]);
    } catch (std::invalid_argument const &e) {
      throw CsvError(std::string(e.what()) + " at row " + std::to_string(lineno), lineno);
    }
    r.open = parse_number(f[idx[1]], "Open", lineno);
    r.high = parse_number(f[idx[2]], "High", lineno);
    r.low = parse_number(f[idx[3]], "Low", lineno);
    r.close = parse_number(f[idx[4]], "Close", lineno);
    double const vol = parse_number(f[idx[5]], "Volume", lineno);
    if (vol != std::floor(vol)) {
      throw CsvError("non-integral volume at row " + std::to_string(lineno), lineno);
    }
    r.volume = static_cast<std::int64_t>(vol);
    check_row(r, lineno);
    rows.emplace_back(r, lineno);
  }
  return rows;
}

OhlcSeries to_series(std::vector<std::pair<OhlcRow, std::size_t>> const &rows, std::string symbol)
{
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i - 1].first.date < rows[i].first.date)) {
      auto const row = rows[i].second;
      throw CsvError("non-increasing date " + format_date(rows[i].first.date) + " at row " + std::to_string(row), row);
    }
  }
  std::vector<OhlcRow> out;
  out.reserve(rows.size());
  for (auto const &[r, line] : rows) out.push_back(r);
  return OhlcSeries(std::move(symbol), std::move(out));
}

std::chrono::sys_days next_weekday(std::chrono::sys_days d)
{
  using std::chrono::Saturday;
  using std::chrono::Sunday;
  using std::chrono::weekday;
  while (weekday{d} == Saturday || weekday{d} == Sunday) d += std::chrono::days{1};
  return d;
}

template <typename ReturnFn>
OhlcSeries synth_series(std::string symbol, Index days, double s0, double volatility, Date start, std::uint64_t seed,
                        ReturnFn &&next_log_return)
{
  std::mt19937_64 wick_rng(mix_seed(seed, 1));
  std::normal_distribution<double> wick(0.0, 1.0);
  double const wick_scale = std::min(0.5 * volatility, 0.25);

  std::vector<OhlcRow> rows;
  rows.reserve(static_cast<std::size_t>(days));
  auto day = next_weekday(std::chrono::sys_days{start});
  double prev = s0;
  for (Index t = 0; t < days; ++t) {
    OhlcRow r;
    r.date = Date{day};
    r.open = prev;
    r.close = t == 0 ? s0 : prev * std::exp(next_log_return());
    double const up = std::min(std::abs(wick(wick_rng)) * wick_scale, 0.25);
    double const down = std::min(std::abs(wick(wick_rng)) * wick_scale, 0.25);
    r.high = std::max(r.open, r.close) * (1.0 + up);
    r.low = std::min(r.open, r.close) * (1.0 - down);
    r.volume = 1'000'000;
    rows.push_back(r);
    prev = r.close;
    day = next_weekday(day + std::chrono::days{1});
  }
  return OhlcSeries(std::move(symbol), std::move(rows));
}

} // namespace

Date parse_date(std::string_view text)
{
  auto bad = [&] { return std::invalid_argument("malformed date '" + std::string(text) + "'"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  auto field = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    auto const r = std::from_chars(text.data() + pos, text.data() + pos + len, v);
    if (r.ec != std::errc{} || r.ptr != text.data() + pos + len) throw bad();
    return v;
  };
  Date const d{std::chrono::year{field(0, 4)}, std::chrono::month{static_cast<unsigned>(field(5, 2))},
               std::chrono::day{static_cast<unsigned>(field(8, 2))}};
  if (!d.ok()) throw bad();
  return d;
}

std::string format_date(Date d)
{
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

OhlcSeries::OhlcSeries(std::string symbol, std::vector<OhlcRow> rows)
  : symbol_(std::move(symbol)), rows_(std::move(rows))
{
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    check_row(rows_[i], i + 1);
    if (i > 0 && !(rows_[i - 1].date < rows_[i].date)) {
      throw std::invalid_argument("dates not strictly increasing at row " + std::to_string(i + 1));
    }
  }
}

#define QSTOCK_COLUMN(name, field)                                                                                     \
  VectorXd OhlcSeries::name() const                                                                                    \
  {                                                                                                                    \
    VectorXd v(size());                                                                                                \
    for (Index i = 0; i < size(); ++i) v[i] = rows_[static_cast<std::size_t>(i)].field;                                \
    return v;                                                                                                          \
  }
QSTOCK_COLUMN(open, open)
QSTOCK_COLUMN(high, high)
QSTOCK_COLUMN(low, low)
QSTOCK_COLUMN(close, close)
#undef QSTOCK_COLUMN

std::vector<Date> OhlcSeries::dates() const
{
  std::vector<Date> out;
  out.reserve(rows_.size());
  for (auto const &r : rows_) out.push_back(r.date);
  return out;
}

OhlcSeries parse_ohlc_csv(std::istream &in, std::string symbol)
{
  return to_series(read_rows(in), std::move(symbol));
}

OhlcSeries parse_ohlc_csv_text(std::string_view text, std::string symbol)
{
  std::istringstream in{std::string(text)};
  return parse_ohlc_csv(in, std::move(symbol));
}

std::string write_ohlc_csv(OhlcSeries const &series)
{
  std::string out = "Date,Open,High,Low,Close,Volume\n";
  for (auto const &r : series.rows()) {
    out += format_date(r.date);
    for (double v : {r.open, r.high, r.low, r.close}) {
      out += ',';
      out += format_number(v);
    }
    out += ',';
    out += std::to_string(r.volume);
    out += '\n';
  }
  return out;
}

OhlcSeries read_ohlc_file(std::string const &path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  auto stem = path.substr(path.find_last_of('/') + 1);
  stem = stem.substr(0, stem.find_last_of('.'));
  try {
    return parse_ohlc_csv(in, stem);
  } catch (CsvError const &e) {
    throw CsvError(path + ": " + e.what(), e.row());
  }
}

void write_ohlc_file(OhlcSeries const &series, std::string const &path)
{
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << write_ohlc_csv(series);
}

OhlcSeries fetch_ohlc(std::string const &symbol, Date start, Date end, std::string const &endpoint)
{
  if (!(start < end)) throw std::invalid_argument("fetch range must satisfy start < end");
  auto const scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint must be an http:// URL: " + endpoint);
  auto const path_start = endpoint.find('/', scheme_end + 3);
  std::string const base = endpoint.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? std::string{} : endpoint.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(base);
  if (!client.is_valid()) throw FetchError(FetchError::Kind::Network, "unsupported endpoint " + endpoint);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  auto const target = prefix + "/" + httplib::detail::encode_url(symbol) + "?start=" + format_date(start) +
                      "&end=" + format_date(end);
  auto const res = client.Get(target);
  if (!res) {
    throw FetchError(FetchError::Kind::Network, "network failure fetching " + symbol + ": " + httplib::to_string(res.error()));
  }
  if (res->status == 404) throw FetchError(FetchError::Kind::SymbolNotFound, "symbol not found: " + symbol);
  if (res->status < 200 || res->status >= 300) {
    throw FetchError(FetchError::Kind::HttpStatus, "HTTP status " + std::to_string(res->status) + " fetching " + symbol);
  }
  if (trim(res->body).empty()) throw FetchError(FetchError::Kind::EmptyPayload, "empty payload for " + symbol);

  std::vector<std::pair<OhlcRow, std::size_t>> rows;
  try {
    std::istringstream in(res->body);
    rows = read_rows(in);
  } catch (CsvError const &e) {
    throw FetchError(FetchError::Kind::BadPayload, std::string("bad payload for ") + symbol + ": " + e.what());
  }
  std::erase_if(rows, [&](auto const &r) { return r.first.date < start || end < r.first.date; });
  if (rows.empty()) throw FetchError(FetchError::Kind::EmptyPayload, "no rows in range for " + symbol);
  std::stable_sort(rows.begin(), rows.end(), [](auto const &a, auto const &b) { return a.first.date < b.first.date; });
  try {
    return to_series(rows, symbol);
  } catch (CsvError const &e) {
    throw FetchError(FetchError::Kind::BadPayload, std::string("bad payload for ") + symbol + ": " + e.what());
  }
}

OhlcSeries generate_gbm_series(GbmParams const &p)
{
  if (p.days < 2) throw std::invalid_argument("gbm: days must be at least 2");
  if (!(p.s0 > 0)) throw std::invalid_argument("gbm: s0 must be positive");
  if (!(p.volatility >= 0)) throw std::invalid_argument("gbm: volatility must be non-negative");
  std::mt19937_64 rng(mix_seed(p.seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  double const mu = p.drift - 0.5 * p.volatility * p.volatility;
  return synth_series("GBM" + std::to_string(p.seed), p.days, p.s0, p.volatility, p.start, p.seed,
                      [&] { return mu + p.volatility * normal(rng); });
}

OhlcSeries generate_momentum_series(MomentumParams const &p)
{
  if (p.days < 2) throw std::invalid_argument("momentum: days must be at least 2");
  if (!(p.s0 > 0)) throw std::invalid_argument("momentum: s0 must be positive");
  if (!(p.volatility >= 0)) throw std::invalid_argument("momentum: volatility must be non-negative");
  if (!(p.persistence >= 0 && p.persistence < 1)) throw std::invalid_argument("momentum: persistence must be in [0, 1)");
  std::mt19937_64 rng(mix_seed(p.seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  double const drift_sd = p.trend_strength * p.volatility;
  double const innovation = drift_sd * std::sqrt(1.0 - p.persistence * p.persistence);
  double drift = drift_sd * normal(rng);
  return synth_series("MOM" + std::to_string(p.seed), p.days, p.s0, p.volatility, p.start, p.seed, [&] {
    double const r = drift + p.volatility * normal(rng);
    drift = p.persistence * drift + innovation * normal(rng);
    return r;
  });
}

LabelVector make_labels(OhlcSeries const &series)
{
  if (series.size() < 2) throw std::invalid_argument("labels need at least 2 rows");
  auto const &rows = series.rows();
  LabelVector y(series.size() - 1);
  for (Index t = 0; t + 1 < series.size(); ++t) {
    y[t] = rows[static_cast<std::size_t>(t)].close < rows[static_cast<std::size_t>(t) + 1].close ? 1 : 0;
  }
  return y;
}

} // namespace qstock
