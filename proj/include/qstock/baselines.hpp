#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "qstock/types.hpp"

namespace qstock {

enum class BaselineKind
{
  LogisticRegression,
  Knn,
  GaussianNb,
  DecisionTree,
  RandomForest,
  GradientBoosting,
};

std::string_view to_string(BaselineKind kind);

struct BaselineParams
{
  // logistic regression: full-batch gradient descent on mean log-loss + l2/2 |w|^2
  double learning_rate = 0.1;
  int epochs = 500;
  double l2 = 1e-4;

  int neighbors = 5;

  double var_smoothing = 1e-9;

  /// Tree depth limit; negative means unlimited.
  int max_depth = 5;
  int trees = 100;
  bool bootstrap = true;
  /// Features tried per split in the forest: 0 = floor(sqrt(d)), negative = all.
  int max_features = 0;

  int rounds = 100;
  int boost_depth = 3;
  double boost_learning_rate = 0.1;

  std::uint64_t seed = 0;
};

struct TreeNode
{
  Index feature = -1;
  double threshold = 0;
  Index left = -1;
  Index right = -1;
  /// Class label (classification) or leaf output (regression).
  double value = 0;
};

struct Tree
{
  std::vector<TreeNode> nodes;

  double evaluate(Eigen::Ref<VectorXd const> const &x) const;
  int depth() const;
};

struct LogisticModel
{
  VectorXd weights;
  double bias = 0;
  /// Training objective before each epoch and after the last.
  std::vector<double> loss_history;
};

struct KnnModel
{
  MatrixXd X;
  LabelVector y;
  int k = 5;
};

struct GaussianNbModel
{
  /// Row c holds class-c statistics.
  MatrixXd mean;
  MatrixXd variance;
  Eigen::Vector2d log_prior;
};

struct ForestModel
{
  std::vector<Tree> trees;
};

struct BoostModel
{
  double base_score = 0;
  double learning_rate = 0.1;
  std::vector<Tree> trees;
};

struct BaselineModel
{
  BaselineKind kind = BaselineKind::LogisticRegression;
  Index features = 0;
  std::variant<LogisticModel, KnnModel, GaussianNbModel, Tree, ForestModel, BoostModel> model;
};

/// Growing a classification tree with Gini splits. `rows` selects (possibly
/// repeated) training rows; features are scanned in ascending index order.
Tree fit_classification_tree(MatrixXd const &X, LabelVector const &y, std::vector<Index> const &rows, int max_depth,
                             int max_features = -1, std::uint64_t seed = 0);

BaselineModel train_baseline(BaselineKind kind, MatrixXd const &X, LabelVector const &y, BaselineParams const &params = {});
LabelVector predict_baseline(BaselineModel const &model, MatrixXd const &X);

} // namespace qstock
