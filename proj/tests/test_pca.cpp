#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qstock/dataset.hpp"
#include "qstock/features.hpp"
#include "qstock/market_data.hpp"
#include "qstock/pca.hpp"
#include "qstock/scaler.hpp"

using namespace qstock;

namespace {

MatrixXd gaussian(Index rows, Index cols, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0, 1);
  MatrixXd X(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) X(i, j) = z(rng);
  return X;
}

MatrixXd random_symmetric(Index n, std::uint64_t seed)
{
  MatrixXd const A = gaussian(n, n, seed);
  return (A + A.transpose()) / 2;
}

MatrixXd sample_cov(MatrixXd const &X)
{
  MatrixXd const c = X.rowwise() - X.colwise().mean();
  return c.transpose() * c / static_cast<double>(X.rows() - 1);
}

Dataset standardized_training_set()
{
  GbmParams p;
  p.days = 504;
  p.seed = 77;
  p.volatility = 0.015;
  auto const split = chronological_split(build_feature_matrix(generate_gbm_series(p)), 0.2);
  return apply_scaler(fit_scaler(split.first, ScalerKind::Standardize), split.first);
}

} // namespace

TEST_CASE("rank-1 data")
{
  MatrixXd X(5, 2);
  for (Index i = 0; i < 5; ++i) {
    X(i, 0) = static_cast<double>(i) - 1.5;
    X(i, 1) = 2 * X(i, 0);
  }
  auto const m = fit_pca(X, 2);
  CHECK(m.components(0, 0) == doctest::Approx(1 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(m.components(0, 1) == doctest::Approx(2 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(std::abs(m.eigenvalues[1]) < 1e-12);
  auto const one = fit_pca(X, 1);
  CHECK(explained_variance_ratio(one)[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("isotropic data matches the library eigensolver")
{
  MatrixXd const X = gaussian(4000, 4, 3);
  auto const m = fit_pca(X, 4);
  Eigen::SelfAdjointEigenSolver<MatrixXd> oracle(sample_cov(X));
  VectorXd const expected = oracle.eigenvalues().reverse();
  for (Index i = 0; i < 4; ++i) {
    CHECK(m.eigenvalues[i] == doctest::Approx(expected[i]).epsilon(1e-10));
    CHECK(m.eigenvalues[i] == doctest::Approx(1.0).epsilon(0.1));
    // Same direction up to sign.
    CHECK(std::abs(m.components.row(i).dot(oracle.eigenvectors().col(3 - i))) == doctest::Approx(1.0).epsilon(1e-8));
  }
  VectorXd const r = explained_variance_ratio(m);
  for (Index i = 0; i < 4; ++i) CHECK(std::abs(r[i] - 0.25) < 0.05);
}

TEST_CASE("argument errors")
{
  MatrixXd const X = gaussian(10, 3, 1);
  CHECK_THROWS_AS(fit_pca(X, 0), std::invalid_argument);
  CHECK_THROWS_AS(fit_pca(X, 4), std::invalid_argument);
  CHECK_THROWS_AS(fit_pca(MatrixXd(X.topRows(1)), 1), std::invalid_argument);
  auto const m = fit_pca(X, 2);
  CHECK_THROWS_AS(transform(m, MatrixXd(gaussian(3, 4, 2))), std::invalid_argument);
  CHECK_THROWS_AS(inverse_transform(m, MatrixXd(gaussian(3, 3, 2))), std::invalid_argument);
}

TEST_CASE("transform on the standardized feature set")
{
  auto const train = standardized_training_set();
  REQUIRE(train.cols() == 13);

  auto const full = fit_pca(train.X, 13);
  MatrixXd const back = inverse_transform(full, transform(full, train.X));
  CHECK((back - train.X).cwiseAbs().maxCoeff() < 1e-8);

  MatrixXd const I = full.components * full.components.transpose();
  CHECK((I - MatrixXd::Identity(13, 13)).cwiseAbs().maxCoeff() < 1e-8);

  MatrixXd const C = sample_cov(transform(full, train.X));
  MatrixXd off = C;
  off.diagonal().setZero();
  CHECK(off.cwiseAbs().maxCoeff() < 1e-8);

  auto const top3 = fit_pca(train.X, 3);
  MatrixXd const Z = transform(top3, train.X);
  CHECK(Z.cols() == 3);
  VectorXd const var = sample_cov(Z).diagonal();
  for (Index i = 0; i < 3; ++i) CHECK(std::abs(var[i] - top3.eigenvalues[i]) < 1e-8);

  VectorXd const r = explained_variance_ratio(full);
  for (Index i = 1; i < r.size(); ++i) CHECK(r[i] <= r[i - 1]);
  CHECK(r.sum() <= 1.0 + 1e-12);
  CHECK(r.sum() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK((full.eigenvalues.array() >= 0).all());

  for (Index i = 0; i < 13; ++i) {
    Index arg;
    full.components.row(i).cwiseAbs().maxCoeff(&arg);
    CHECK(full.components(i, arg) > 0);
  }
}

TEST_CASE("Jacobi reconstruction on random symmetric matrices")
{
  for (Index n = 1; n <= 13; ++n) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      MatrixXd const A = random_symmetric(n, 100 * static_cast<std::uint64_t>(n) + seed);
      auto const e = jacobi_eigen<double>(A);
      MatrixXd const R = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
      REQUIRE((R - A).cwiseAbs().maxCoeff() < 1e-8);
      REQUIRE((e.eigenvectors.transpose() * e.eigenvectors - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
      for (Index i = 1; i < n; ++i) REQUIRE(e.eigenvalues[i] <= e.eigenvalues[i - 1]);
      REQUIRE(e.sweeps <= 100);
    }
  }
}

TEST_CASE("Jacobi eigenvalues against characteristic polynomials")
{
  // 2x2: roots of t^2 - tr t + det.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    MatrixXd const A = random_symmetric(2, seed);
    double const tr = A.trace(), det = A.determinant();
    double const disc = std::sqrt(tr * tr / 4 - det);
    auto const e = jacobi_eigen<double>(A);
    CHECK(e.eigenvalues[0] == doctest::Approx(tr / 2 + disc).epsilon(1e-13));
    CHECK(e.eigenvalues[1] == doctest::Approx(tr / 2 - disc).epsilon(1e-13));
  }
  // 3x3: trigonometric roots of the depressed cubic.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    MatrixXd const A = random_symmetric(3, 50 + seed);
    double const q = A.trace() / 3;
    MatrixXd const B = A - q * MatrixXd::Identity(3, 3);
    double const p = std::sqrt((B * B).trace() / 6);
    double const r = std::clamp((B / p).determinant() / 2, -1.0, 1.0);
    double const phi = std::acos(r) / 3;
    double const l1 = q + 2 * p * std::cos(phi);
    double const l3 = q + 2 * p * std::cos(phi + 2 * std::numbers::pi / 3);
    double const l2 = 3 * q - l1 - l3;
    auto const e = jacobi_eigen<double>(A);
    CHECK(std::abs(e.eigenvalues[0] - l1) < 1e-10);
    CHECK(std::abs(e.eigenvalues[1] - l2) < 1e-10);
    CHECK(std::abs(e.eigenvalues[2] - l3) < 1e-10);
  }
  CHECK_THROWS_AS(jacobi_eigen<double>(MatrixXd(2, 3)), std::invalid_argument);
}

TEST_CASE("projection never stretches distances")
{
  MatrixXd const X = gaussian(60, 8, 9) * gaussian(8, 8, 10);
  for (Index k = 1; k <= 8; ++k) {
    auto const m = fit_pca(X, k);
    MatrixXd const Z = transform(m, X);
    for (Index i = 0; i < X.rows(); ++i)
      for (Index j = i + 1; j < X.rows(); ++j)
        REQUIRE((Z.row(i) - Z.row(j)).norm() <= (X.row(i) - X.row(j)).norm() + 1e-8);
  }
}

TEST_CASE("fitting is deterministic")
{
  MatrixXd const X = gaussian(200, 13, 11);
  auto const a = fit_pca(X, 5);
  auto const b = fit_pca(X, 5);
  CHECK(a.components == b.components);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.mean == b.mean);
}

TEST_CASE("single precision")
{
  Eigen::MatrixXf X(4, 2);
  X << 1, 2, 2, 4, 3, 6, 4, 8;
  auto const m = fit_pca<float>(X, 1);
  CHECK(m.components(0, 1) == doctest::Approx(2 / std::sqrt(5.0)).epsilon(1e-5));
}
