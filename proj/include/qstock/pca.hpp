#pragma once

#include <stdexcept>

#include "qstock/symmetric_eigen.hpp"
#include "qstock/types.hpp"

namespace qstock {

template <typename Scalar> struct PcaModel
{
  RowVector<Scalar> mean;
  /// k x d, orthonormal rows.
  Matrix<Scalar> components;
  /// Non-increasing, clamped at 0.
  Vector<Scalar> eigenvalues;
  /// Trace of the fit covariance.
  Scalar total_variance = 0;

  Index k() const { return components.rows(); }
};

/// Top-k eigenpairs of the sample covariance (divisor n - 1). Each component is
/// signed so its largest-magnitude entry is positive.
template <typename Scalar> PcaModel<Scalar> fit_pca(Matrix<Scalar> const &X, Index k)
{
  if (X.rows() < 2) throw std::invalid_argument("pca: need at least 2 rows");
  if (k < 1 || k > X.cols()) throw std::invalid_argument("pca: k must lie in [1, feature count]");

  PcaModel<Scalar> model;
  model.mean = X.colwise().mean();
  Matrix<Scalar> const centered = X.rowwise() - model.mean;
  Matrix<Scalar> const cov = (centered.transpose() * centered) / Scalar(X.rows() - 1);
  model.total_variance = cov.trace();

  auto const eig = jacobi_eigen<Scalar>(cov);
  model.components.resize(k, X.cols());
  model.eigenvalues.resize(k);
  for (Index i = 0; i < k; ++i) {
    Vector<Scalar> v = eig.eigenvectors.col(i);
    Index arg = 0;
    for (Index j = 1; j < v.size(); ++j)
      if (std::abs(v[j]) > std::abs(v[arg])) arg = j;
    if (v[arg] < 0) v = -v;
    model.components.row(i) = v.transpose();
    model.eigenvalues[i] = std::max(eig.eigenvalues[i], Scalar(0));
  }
  return model;
}

template <typename Scalar> Matrix<Scalar> transform(PcaModel<Scalar> const &model, Matrix<Scalar> const &X)
{
  if (X.cols() != model.mean.size()) throw std::invalid_argument("pca: column count mismatch");
  return (X.rowwise() - model.mean) * model.components.transpose();
}

template <typename Scalar> Matrix<Scalar> inverse_transform(PcaModel<Scalar> const &model, Matrix<Scalar> const &Z)
{
  if (Z.cols() != model.k()) throw std::invalid_argument("pca: component count mismatch");
  return (Z * model.components).rowwise() + model.mean;
}

template <typename Scalar> Vector<Scalar> explained_variance_ratio(PcaModel<Scalar> const &model)
{
  if (model.total_variance <= Scalar(0)) return Vector<Scalar>::Zero(model.k());
  return model.eigenvalues / model.total_variance;
}

} // namespace qstock
