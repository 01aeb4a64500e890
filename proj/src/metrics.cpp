#include "qstock/metrics.hpp"

#include <stdexcept>

namespace qstock {

Metrics metrics_from_confusion(Confusion const &c)
{
  auto ratio = [](Index num, Index den) { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); };
  Metrics m;
  m.confusion = c;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f_score = m.precision + m.recall == 0 ? 0.0 : 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

Metrics compute_metrics(LabelVector const &y_true, LabelVector const &y_pred)
{
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("metrics: label vectors differ in length");
  if (y_true.size() == 0) throw std::invalid_argument("metrics: empty label vectors");
  Confusion c;
  for (Index i = 0; i < y_true.size(); ++i) {
    int const t = y_true[i], p = y_pred[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1)) throw std::invalid_argument("metrics: labels must be 0 or 1");
    if (t == 1 && p == 1) ++c.tp;
    else if (t == 0 && p == 1) ++c.fp;
    else if (t == 0 && p == 0) ++c.tn;
    else ++c.fn;
  }
  return metrics_from_confusion(c);
}

} // namespace qstock
