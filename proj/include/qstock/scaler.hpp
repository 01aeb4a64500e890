#pragma once

#include <string>
#include <vector>

#include "qstock/dataset.hpp"

namespace qstock {

enum class ScalerKind
{
  Standardize,
  /// Affine map of the training range onto [0, pi]; out-of-range values are clamped.
  MinMaxToAngle,
};

/// Per-feature statistics fitted on training rows only. For Standardize the
/// statistics are (mean, population stddev); for MinMaxToAngle (min, max).
struct Scaler
{
  ScalerKind kind = ScalerKind::Standardize;
  std::vector<std::string> feature_names;
  VectorXd first;
  VectorXd second;
};

Scaler fit_scaler(Dataset const &train, ScalerKind kind);
Dataset apply_scaler(Scaler const &scaler, Dataset const &data);
MatrixXd apply_scaler(Scaler const &scaler, MatrixXd const &X);

} // namespace qstock
