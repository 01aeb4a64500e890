#pragma once

#include <array>
#include <string_view>

#include "qstock/dataset.hpp"
#include "qstock/market_data.hpp"

namespace qstock {

/// Column order of the canonical indicator set.
inline constexpr std::array<std::string_view, 13> kCanonicalFeatures{
  "sma_10",       "sma_20",    "ema_10",     "ema_20", "rsi_14",      "macd_12_26",   "macd_signal_9",
  "macd_hist",    "stoch_k_14", "stoch_d_3", "atr_14", "aroon_up_25", "aroon_down_25",
};

/// Longest warm-up among the canonical indicators (the MACD signal line).
inline constexpr Index kCanonicalWarmUp = 33;

/// Computes the canonical indicators, drops warm-up rows and the final
/// unlabeled day. Row t predicts close[t] vs close[t + 1].
Dataset build_feature_matrix(OhlcSeries const &series);

} // namespace qstock
