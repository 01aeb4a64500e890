#pragma once

#include <vector>

#include "qstock/types.hpp"

namespace qstock {

enum class SvmKernelKind
{
  Linear,
  Rbf,
  Precomputed,
};

struct SvmKernel
{
  SvmKernelKind kind = SvmKernelKind::Rbf;
  double gamma = 1.0;

  static SvmKernel linear() { return {SvmKernelKind::Linear, 0.0}; }
  static SvmKernel rbf(double gamma) { return {SvmKernelKind::Rbf, gamma}; }
  static SvmKernel precomputed() { return {SvmKernelKind::Precomputed, 0.0}; }
};

/// gamma = 1 / (n_features * var(X)) over all entries of X; 1 when X is constant.
double default_rbf_gamma(MatrixXd const &X);

/// Kernel between rows of A and rows of B (not for Precomputed).
MatrixXd evaluate_kernel(SvmKernel const &kernel, MatrixXd const &A, MatrixXd const &B);

struct SvmParams
{
  double C = 1.0;
  /// Stop once the maximal KKT violation drops below this.
  double tol = 1e-3;
  /// Passes over the training set before giving up; one pass = n pair updates.
  long max_passes = 10'000;
};

struct SvmModel
{
  SvmKernel kernel;
  double C = 1.0;
  /// Dual coefficients in [0, C].
  VectorXd alpha;
  /// Training labels mapped to {-1, +1}.
  VectorXd y_signed;
  double bias = 0;
  std::vector<Index> support;
  /// Training points; empty for the precomputed kernel.
  MatrixXd train_points;
  long iterations = 0;
  bool converged = false;
};

/// SMO on a precomputed symmetric Gram matrix. Labels in {0, 1}.
SvmModel train_svm_precomputed(MatrixXd const &K, LabelVector const &y, SvmParams const &params = {});
SvmModel train_svm(MatrixXd const &X, LabelVector const &y, SvmKernel const &kernel, SvmParams const &params = {});

/// sum_i alpha_i y_i K(x, x_i) + b for each row of K_test (test x train).
VectorXd svm_decision_precomputed(SvmModel const &model, MatrixXd const &K_test);
/// Label 1 iff the decision value is strictly positive.
LabelVector predict_svm_precomputed(SvmModel const &model, MatrixXd const &K_test);
LabelVector predict_svm(SvmModel const &model, MatrixXd const &X_test);

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij with y in {-1, +1}.
double svm_dual_objective(MatrixXd const &K, VectorXd const &y_signed, VectorXd const &alpha);

} // namespace qstock
