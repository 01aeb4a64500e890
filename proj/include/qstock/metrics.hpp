#pragma once

#include "qstock/types.hpp"

namespace qstock {

struct Confusion
{
  Index tp = 0;
  Index fp = 0;
  Index tn = 0;
  Index fn = 0;

  Index total() const { return tp + fp + tn + fn; }
};

/// Positive class is label 1 (price up). Ratios with a zero denominator are 0.
struct Metrics
{
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f_score = 0;
  Confusion confusion;
};

Metrics compute_metrics(LabelVector const &y_true, LabelVector const &y_pred);
Metrics metrics_from_confusion(Confusion const &c);

} // namespace qstock
