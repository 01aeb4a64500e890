#include "qstock/svm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qstock {

double default_rbf_gamma(MatrixXd const &X)
{
  if (X.size() == 0) throw std::invalid_argument("rbf gamma: empty data");
  double const mean = X.mean();
  double const var = (X.array() - mean).square().mean();
  return var > 0 ? 1.0 / (static_cast<double>(X.cols()) * var) : 1.0;
}

MatrixXd evaluate_kernel(SvmKernel const &kernel, MatrixXd const &A, MatrixXd const &B)
{
  if (A.cols() != B.cols()) throw std::invalid_argument("svm kernel: dimension mismatch");
  switch (kernel.kind) {
  case SvmKernelKind::Linear: return A * B.transpose();
  case SvmKernelKind::Rbf: {
    VectorXd const na = A.rowwise().squaredNorm();
    VectorXd const nb = B.rowwise().squaredNorm();
    MatrixXd d2 = (-2.0 * A * B.transpose()).colwise() + na;
    d2.rowwise() += nb.transpose();
    return (-kernel.gamma * d2.cwiseMax(0.0)).array().exp();
  }
  case SvmKernelKind::Precomputed: break;
  }
  throw std::invalid_argument("svm kernel: precomputed kernels cannot be evaluated on points");
}

double svm_dual_objective(MatrixXd const &K, VectorXd const &y_signed, VectorXd const &alpha)
{
  VectorXd const ay = alpha.cwiseProduct(y_signed);
  return alpha.sum() - 0.5 * ay.dot(K * ay);
}

SvmModel train_svm_precomputed(MatrixXd const &K, LabelVector const &y, SvmParams const &p)
{
  Index const n = K.rows();
  if (K.cols() != n) throw std::invalid_argument("svm: kernel matrix must be square");
  if (y.size() != n) throw std::invalid_argument("svm: label count does not match kernel size");
  if (!(p.C > 0)) throw std::invalid_argument("svm: C must be positive");
  double const scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw std::invalid_argument("svm: kernel matrix is not symmetric");
  Index const positives = (y.array() == 1).count();
  if ((y.array() != 0 && y.array() != 1).any()) throw std::invalid_argument("svm: labels must be 0 or 1");
  if (positives == 0 || positives == n) throw std::invalid_argument("svm: training labels contain a single class");

  SvmModel m;
  m.kernel = SvmKernel::precomputed();
  m.C = p.C;
  m.y_signed = (2 * y.array() - 1).cast<double>();
  m.alpha = VectorXd::Zero(n);
  VectorXd const& ys = m.y_signed;
  VectorXd& alpha = m.alpha;
  double const C = p.C;
  constexpr double kTau = 1e-12;

  // Gradient of 1/2 a^T Q a - e^T a with Q_ij = y_i y_j K_ij.
  VectorXd G = VectorXd::Constant(n, -1.0);
  auto in_up = [&](Index t) { return ys[t] > 0 ? alpha[t] < C : alpha[t] > 0; };
  auto in_low = [&](Index t) { return ys[t] > 0 ? alpha[t] > 0 : alpha[t] < C; };

  long const cap = p.max_passes * std::max<long>(1, static_cast<long>(n));
  for (; m.iterations < cap; ++m.iterations) {
    // Maximal violating pair; first index wins ties so the scan is deterministic.
    Index i = -1, j = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (Index t = 0; t < n; ++t) {
      double const v = -ys[t] * G[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i < 0 || j < 0 || gmax - gmin < p.tol) {
      m.converged = true;
      break;
    }

    double const Qij = ys[i] * ys[j] * K(i, j);
    double const old_i = alpha[i], old_j = alpha[j];
    if (ys[i] != ys[j]) {
      double quad = K(i, i) + K(j, j) + 2 * Qij;
      if (quad <= 0) quad = kTau;
      double const delta = (-G[i] - G[j]) / quad;
      double const diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = K(i, i) + K(j, j) - 2 * Qij;
      if (quad <= 0) quad = kTau;
      double const delta = (G[i] - G[j]) / quad;
      double const sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }

    double const di = alpha[i] - old_i, dj = alpha[j] - old_j;
    G += (ys[i] * di) * ys.cwiseProduct(K.col(i)) + (ys[j] * dj) * ys.cwiseProduct(K.col(j));
  }

  // Bias: mean over free vectors, midpoint of the feasible interval otherwise.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, free_sum = 0;
  Index free_count = 0;
  for (Index t = 0; t < n; ++t) {
    double const yG = ys[t] * G[t];
    if (alpha[t] >= C) {
      if (ys[t] < 0) ub = std::min(ub, yG);
      else lb = std::max(lb, yG);
    } else if (alpha[t] <= 0) {
      if (ys[t] > 0) ub = std::min(ub, yG);
      else lb = std::max(lb, yG);
    } else {
      ++free_count;
      free_sum += yG;
    }
  }
  double const rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2;
  m.bias = -rho;
  for (Index t = 0; t < n; ++t)
    if (alpha[t] > 0) m.support.push_back(t);
  return m;
}

SvmModel train_svm(MatrixXd const &X, LabelVector const &y, SvmKernel const &kernel, SvmParams const &p)
{
  if (X.rows() == 0) throw std::invalid_argument("svm: empty training data");
  auto m = train_svm_precomputed(evaluate_kernel(kernel, X, X), y, p);
  m.kernel = kernel;
  m.train_points = X;
  return m;
}

VectorXd svm_decision_precomputed(SvmModel const &model, MatrixXd const &K_test)
{
  if (K_test.cols() != model.alpha.size()) throw std::invalid_argument("svm predict: kernel columns must match training size");
  return (K_test * model.alpha.cwiseProduct(model.y_signed)).array() + model.bias;
}

LabelVector predict_svm_precomputed(SvmModel const &model, MatrixXd const &K_test)
{
  return (svm_decision_precomputed(model, K_test).array() > 0.0).cast<int>();
}

LabelVector predict_svm(SvmModel const &model, MatrixXd const &X_test)
{
  if (model.kernel.kind == SvmKernelKind::Precomputed) {
    throw std::invalid_argument("svm predict: model was trained on a precomputed kernel");
  }
  if (X_test.cols() != model.train_points.cols()) throw std::invalid_argument("svm predict: feature count mismatch");
  return predict_svm_precomputed(model, evaluate_kernel(model.kernel, X_test, model.train_points));
}

} // namespace qstock
