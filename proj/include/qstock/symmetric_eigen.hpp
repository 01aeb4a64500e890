#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qstock/types.hpp"

namespace qstock {

template <typename Scalar> struct SymmetricEigen
{
  /// Non-increasing.
  Vector<Scalar> eigenvalues;
  /// Column i pairs with eigenvalues[i].
  Matrix<Scalar> eigenvectors;
  int sweeps = 0;
};

/// Cyclic Jacobi rotations. Stops once the off-diagonal Frobenius norm falls
/// below `tolerance` (scaled by max(1, ||A||_F)) or after `max_sweeps`.
template <typename Scalar>
SymmetricEigen<Scalar> jacobi_eigen(Matrix<Scalar> const &input, Scalar tolerance = Scalar(1e-12), int max_sweeps = 100)
{
  Index const n = input.rows();
  if (input.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix must be square");
  Matrix<Scalar> a = (input + input.transpose()) / Scalar(2);
  Matrix<Scalar> v = Matrix<Scalar>::Identity(n, n);
  Scalar const threshold = tolerance * std::max(Scalar(1), a.norm());

  auto off_norm = [&] {
    Scalar s = 0;
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < max_sweeps && off_norm() >= threshold; ++sweep) {
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        Scalar const apq = a(p, q);
        if (apq == Scalar(0)) continue;
        Scalar const theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
        Scalar const t = (theta >= 0 ? Scalar(1) : Scalar(-1)) / (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        Scalar const c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        Scalar const s = t * c;
        for (Index k = 0; k < n; ++k) {
          Scalar const akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          Scalar const apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          Scalar const vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) > a(j, j); });

  SymmetricEigen<Scalar> out;
  out.sweeps = sweep;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    out.eigenvalues[i] = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.eigenvectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

} // namespace qstock
