#include "qstock/features.hpp"

#include <stdexcept>

#include "qstock/indicators.hpp"

namespace qstock {

Dataset build_feature_matrix(OhlcSeries const &series)
{
  constexpr Index kMinRows = 30;
  Index const n = series.size();
  if (n - kCanonicalWarmUp - 1 < kMinRows) {
    throw std::invalid_argument("series too short: " + std::to_string(n) + " rows, need at least " +
                                std::to_string(kCanonicalWarmUp + 1 + kMinRows));
  }
  VectorXd const close = series.close();
  VectorXd const high = series.high();
  VectorXd const low = series.low();

  auto const m = macd(close, 12, 26, 9);
  auto const st = stochastic(high, low, close, 14, 3);
  auto const ar = aroon(high, low, 25);
  std::array<IndicatorSeries<double>, 13> const columns{
    sma(close, 10), sma(close, 20), ema(close, 10), ema(close, 20), rsi(close, 14), m.line, m.signal,
    m.histogram,    st.k,           st.d,           atr(high, low, close, 14),     ar.up,  ar.down,
  };

  Index warm_up = 0;
  for (auto const &c : columns) warm_up = std::max(warm_up, c.warm_up);
  Index const rows = n - warm_up - 1;

  Dataset out;
  out.X.resize(rows, static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.feature_names.emplace_back(kCanonicalFeatures[c]);
    out.X.col(static_cast<Index>(c)) = columns[c].values.segment(warm_up, rows);
  }
  out.y = make_labels(series).segment(warm_up, rows);
  auto const dates = series.dates();
  out.dates.assign(dates.begin() + warm_up, dates.begin() + warm_up + rows);
  if (!out.X.allFinite()) throw std::logic_error("feature matrix contains undefined entries after trimming");
  return out;
}

} // namespace qstock
