#include "qstock/scaler.hpp"

#include <numbers>
#include <stdexcept>

namespace qstock {

Scaler fit_scaler(Dataset const &train, ScalerKind kind)
{
  if (train.rows() == 0 || train.cols() == 0) throw std::invalid_argument("scaler: empty training data");
  Scaler s;
  s.kind = kind;
  s.feature_names = train.feature_names;
  if (kind == ScalerKind::Standardize) {
    s.first = train.X.colwise().mean().transpose();
    s.second = ((train.X.rowwise() - s.first.transpose()).array().square().colwise().mean()).sqrt().transpose();
  } else {
    s.first = train.X.colwise().minCoeff().transpose();
    s.second = train.X.colwise().maxCoeff().transpose();
  }
  if (!s.first.allFinite() || !s.second.allFinite()) throw std::invalid_argument("scaler: non-finite statistics");
  return s;
}

MatrixXd apply_scaler(Scaler const &s, MatrixXd const &X)
{
  if (X.cols() != s.first.size()) throw std::invalid_argument("scaler: column count mismatch");
  MatrixXd out(X.rows(), X.cols());
  for (Index c = 0; c < X.cols(); ++c) {
    if (s.kind == ScalerKind::Standardize) {
      if (s.second[c] > 0) {
        out.col(c) = (X.col(c).array() - s.first[c]) / s.second[c];
      } else {
        out.col(c).setZero();
      }
    } else {
      double const range = s.second[c] - s.first[c];
      if (range > 0) {
        out.col(c) = ((X.col(c).array() - s.first[c]) / range * std::numbers::pi).cwiseMax(0.0).cwiseMin(std::numbers::pi);
      } else {
        out.col(c).setConstant(std::numbers::pi / 2);
      }
    }
  }
  return out;
}

Dataset apply_scaler(Scaler const &s, Dataset const &data)
{
  if (data.feature_names != s.feature_names) throw std::invalid_argument("scaler: feature names do not match");
  return data.with_features(apply_scaler(s, data.X), data.feature_names);
}

} // namespace qstock
