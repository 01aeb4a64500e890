#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qstock/types.hpp"

namespace qstock {

/// An indicator aligned to its source series. The first `warm_up` entries are
/// NaN; every later entry is finite.
template <typename Scalar> struct IndicatorSeries
{
  std::string name;
  Vector<Scalar> values;
  Index warm_up = 0;

  Index size() const { return values.size(); }
  bool defined(Index t) const { return t >= warm_up; }
};

template <typename Scalar> struct MacdSeries
{
  IndicatorSeries<Scalar> line;
  IndicatorSeries<Scalar> signal;
  IndicatorSeries<Scalar> histogram;
};

template <typename Scalar> struct StochasticSeries
{
  IndicatorSeries<Scalar> k;
  IndicatorSeries<Scalar> d;
};

template <typename Scalar> struct AroonSeries
{
  IndicatorSeries<Scalar> up;
  IndicatorSeries<Scalar> down;
};

namespace detail {

inline void require_window(Index window, char const *what)
{
  if (window < 1) throw std::invalid_argument(std::string(what) + ": window must be at least 1");
}

template <typename Scalar> Vector<Scalar> undefined(Index n)
{
  return Vector<Scalar>::Constant(n, std::numeric_limits<Scalar>::quiet_NaN());
}

/// Trailing mean over values[start..], which are assumed defined from `start` on.
template <typename Scalar>
IndicatorSeries<Scalar> sma_from(std::string name, Vector<Scalar> const &values, Index window, Index start)
{
  Index const n = values.size();
  if (start + window > n) throw std::invalid_argument(name + ": window exceeds series length");
  IndicatorSeries<Scalar> out{std::move(name), undefined<Scalar>(n), start + window - 1};
  Scalar sum = 0;
  for (Index t = start; t < n; ++t) {
    sum += values[t];
    if (t - start >= window) sum -= values[t - window];
    if (t >= out.warm_up) out.values[t] = sum / Scalar(window);
  }
  return out;
}

/// EMA with alpha = 2 / (window + 1), seeded by the simple mean of the first window defined values.
template <typename Scalar>
IndicatorSeries<Scalar> ema_from(std::string name, Vector<Scalar> const &values, Index window, Index start)
{
  Index const n = values.size();
  if (start + window > n) throw std::invalid_argument(name + ": window exceeds series length");
  IndicatorSeries<Scalar> out{std::move(name), undefined<Scalar>(n), start + window - 1};
  Scalar const alpha = Scalar(2) / Scalar(window + 1);
  out.values[out.warm_up] = values.segment(start, window).mean();
  for (Index t = out.warm_up + 1; t < n; ++t) {
    out.values[t] = alpha * values[t] + (Scalar(1) - alpha) * out.values[t - 1];
  }
  return out;
}

} // namespace detail

template <typename Scalar> IndicatorSeries<Scalar> sma(Vector<Scalar> const &close, Index window)
{
  detail::require_window(window, "sma");
  return detail::sma_from("sma_" + std::to_string(window), close, window, 0);
}

template <typename Scalar> IndicatorSeries<Scalar> ema(Vector<Scalar> const &close, Index window)
{
  detail::require_window(window, "ema");
  return detail::ema_from("ema_" + std::to_string(window), close, window, 0);
}

/// Wilder RSI. Both averages are seeded with simple means of the first `window`
/// deltas. A completely flat stretch (no gains, no losses) reads 50.
template <typename Scalar> IndicatorSeries<Scalar> rsi(Vector<Scalar> const &close, Index window)
{
  detail::require_window(window, "rsi");
  Index const n = close.size();
  if (n <= window) throw std::invalid_argument("rsi: series must be longer than the window");
  IndicatorSeries<Scalar> out{"rsi_" + std::to_string(window), detail::undefined<Scalar>(n), window};

  auto value = [](Scalar gain, Scalar loss) -> Scalar {
    if (loss == 0) return gain == 0 ? Scalar(50) : Scalar(100);
    return Scalar(100) - Scalar(100) / (Scalar(1) + gain / loss);
  };

  Scalar gain = 0, loss = 0;
  for (Index t = 1; t <= window; ++t) {
    Scalar const d = close[t] - close[t - 1];
    gain += std::max(d, Scalar(0));
    loss += std::max(-d, Scalar(0));
  }
  gain /= Scalar(window);
  loss /= Scalar(window);
  out.values[window] = value(gain, loss);
  for (Index t = window + 1; t < n; ++t) {
    Scalar const d = close[t] - close[t - 1];
    gain = (gain * Scalar(window - 1) + std::max(d, Scalar(0))) / Scalar(window);
    loss = (loss * Scalar(window - 1) + std::max(-d, Scalar(0))) / Scalar(window);
    out.values[t] = value(gain, loss);
  }
  return out;
}

template <typename Scalar>
MacdSeries<Scalar> macd(Vector<Scalar> const &close, Index fast = 12, Index slow = 26, Index signal = 9)
{
  detail::require_window(fast, "macd");
  detail::require_window(signal, "macd");
  if (fast >= slow) throw std::invalid_argument("macd: fast window must be shorter than slow window");
  auto const f = ema(close, fast);
  auto const s = ema(close, slow);

  MacdSeries<Scalar> out;
  out.line = {"macd_" + std::to_string(fast) + "_" + std::to_string(slow), detail::undefined<Scalar>(close.size()),
              s.warm_up};
  Index const tail = close.size() - s.warm_up;
  out.line.values.tail(tail) = f.values.tail(tail) - s.values.tail(tail);
  out.signal = detail::ema_from("macd_signal_" + std::to_string(signal), out.line.values, signal, out.line.warm_up);
  out.histogram = {"macd_hist", detail::undefined<Scalar>(close.size()), out.signal.warm_up};
  Index const hist_tail = close.size() - out.signal.warm_up;
  out.histogram.values.tail(hist_tail) = out.line.values.tail(hist_tail) - out.signal.values.tail(hist_tail);
  return out;
}

/// %K over the trailing k_window bars and %D as its d_window SMA. A flat range reads 50.
template <typename Scalar>
StochasticSeries<Scalar> stochastic(Vector<Scalar> const &high, Vector<Scalar> const &low, Vector<Scalar> const &close,
                                    Index k_window = 14, Index d_window = 3)
{
  detail::require_window(k_window, "stochastic");
  detail::require_window(d_window, "stochastic");
  Index const n = close.size();
  if (high.size() != n || low.size() != n) throw std::invalid_argument("stochastic: length mismatch");
  if (k_window > n) throw std::invalid_argument("stochastic: window exceeds series length");

  StochasticSeries<Scalar> out;
  out.k = {"stoch_k_" + std::to_string(k_window), detail::undefined<Scalar>(n), k_window - 1};
  for (Index t = k_window - 1; t < n; ++t) {
    Scalar const hh = high.segment(t - k_window + 1, k_window).maxCoeff();
    Scalar const ll = low.segment(t - k_window + 1, k_window).minCoeff();
    out.k.values[t] = hh == ll ? Scalar(50) : Scalar(100) * (close[t] - ll) / (hh - ll);
  }
  out.d = detail::sma_from("stoch_d_" + std::to_string(d_window), out.k.values, d_window, out.k.warm_up);
  return out;
}

/// Wilder ATR. True range starts at t = 1 (it needs the previous close), and
/// the first ATR at t = window is the simple mean of TR[1..window].
template <typename Scalar>
IndicatorSeries<Scalar> atr(Vector<Scalar> const &high, Vector<Scalar> const &low, Vector<Scalar> const &close,
                            Index window = 14)
{
  detail::require_window(window, "atr");
  Index const n = close.size();
  if (high.size() != n || low.size() != n) throw std::invalid_argument("atr: length mismatch");
  if (n <= window) throw std::invalid_argument("atr: series must be longer than the window");

  IndicatorSeries<Scalar> out{"atr_" + std::to_string(window), detail::undefined<Scalar>(n), window};
  auto true_range = [&](Index t) {
    return std::max({high[t] - low[t], std::abs(high[t] - close[t - 1]), std::abs(low[t] - close[t - 1])});
  };
  Scalar avg = 0;
  for (Index t = 1; t <= window; ++t) avg += true_range(t);
  avg /= Scalar(window);
  out.values[window] = avg;
  for (Index t = window + 1; t < n; ++t) {
    avg = (avg * Scalar(window - 1) + true_range(t)) / Scalar(window);
    out.values[t] = avg;
  }
  return out;
}

/// Aroon over the trailing window + 1 bars. Ties go to the most recent extremum.
template <typename Scalar>
AroonSeries<Scalar> aroon(Vector<Scalar> const &high, Vector<Scalar> const &low, Index window = 25)
{
  detail::require_window(window, "aroon");
  Index const n = high.size();
  if (low.size() != n) throw std::invalid_argument("aroon: length mismatch");
  if (n <= window) throw std::invalid_argument("aroon: series must be longer than the window");

  AroonSeries<Scalar> out;
  out.up = {"aroon_up_" + std::to_string(window), detail::undefined<Scalar>(n), window};
  out.down = {"aroon_down_" + std::to_string(window), detail::undefined<Scalar>(n), window};
  for (Index t = window; t < n; ++t) {
    Index hi = t, lo = t;
    for (Index s = t - 1; s >= t - window; --s) {
      if (high[s] > high[hi]) hi = s;
      if (low[s] < low[lo]) lo = s;
    }
    out.up.values[t] = Scalar(100) * Scalar(window - (t - hi)) / Scalar(window);
    out.down.values[t] = Scalar(100) * Scalar(window - (t - lo)) / Scalar(window);
  }
  return out;
}

} // namespace qstock
