#include "qstock/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qstock {

std::string_view to_string(BaselineKind kind)
{
  switch (kind) {
  case BaselineKind::LogisticRegression: return "logistic_regression";
  case BaselineKind::Knn: return "knn";
  case BaselineKind::GaussianNb: return "gaussian_nb";
  case BaselineKind::DecisionTree: return "decision_tree";
  case BaselineKind::RandomForest: return "random_forest";
  case BaselineKind::GradientBoosting: return "gradient_boosting";
  }
  return "?";
}

double Tree::evaluate(Eigen::Ref<VectorXd const> const &x) const
{
  Index node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    auto const &n = nodes[static_cast<std::size_t>(node)];
    node = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(node)].value;
}

int Tree::depth() const
{
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

namespace {

struct Split
{
  Index feature = -1;
  double threshold = 0;
  double score = std::numeric_limits<double>::infinity();
};

double midpoint(double a, double b)
{
  double const m = a + (b - a) / 2;
  return m < b ? m : a;
}

/// Shared recursive CART driver. `Criterion` supplies leaf values, purity and
/// the best split of a row set on one feature (lower score is better).
template <typename Criterion> class TreeBuilder
{
public:
  TreeBuilder(MatrixXd const &X, Criterion const &criterion, int max_depth, int max_features, std::uint64_t seed)
    : X_(X), criterion_(criterion), max_depth_(max_depth), max_features_(max_features), rng_(seed)
  {
  }

  Tree build(std::vector<Index> rows)
  {
    Tree tree;
    tree.nodes.emplace_back();
    grow(tree, 0, std::move(rows), 0);
    return tree;
  }

private:
  std::vector<Index> candidate_features()
  {
    std::vector<Index> f(static_cast<std::size_t>(X_.cols()));
    std::iota(f.begin(), f.end(), Index{0});
    if (max_features_ < 0 || max_features_ >= X_.cols()) return f;
    for (int i = 0; i < max_features_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), f.size() - 1);
      std::swap(f[static_cast<std::size_t>(i)], f[pick(rng_)]);
    }
    f.resize(static_cast<std::size_t>(max_features_));
    std::sort(f.begin(), f.end());
    return f;
  }

  void grow(Tree &tree, std::size_t node, std::vector<Index> rows, int depth)
  {
    tree.nodes[node].value = criterion_.leaf_value(rows);
    if ((max_depth_ >= 0 && depth >= max_depth_) || rows.size() < 2 || criterion_.pure(rows)) return;

    Split best;
    for (Index f : candidate_features()) {
      std::stable_sort(rows.begin(), rows.end(), [&](Index a, Index b) { return X_(a, f) < X_(b, f); });
      auto const s = criterion_.best_split(X_, rows, f);
      if (s.feature >= 0 && s.score < best.score) best = s;
    }
    if (best.feature < 0) return;

    std::vector<Index> left, right;
    for (Index r : rows) (X_(r, best.feature) <= best.threshold ? left : right).push_back(r);
    auto const l = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    tree.nodes[node].feature = best.feature;
    tree.nodes[node].threshold = best.threshold;
    tree.nodes[node].left = static_cast<Index>(l);
    tree.nodes[node].right = static_cast<Index>(l + 1);
    grow(tree, l, std::move(left), depth + 1);
    grow(tree, l + 1, std::move(right), depth + 1);
  }

  MatrixXd const &X_;
  Criterion const &criterion_;
  int max_depth_;
  int max_features_;
  std::mt19937_64 rng_;
};

struct GiniCriterion
{
  LabelVector const &y;

  double leaf_value(std::vector<Index> const &rows) const
  {
    Index ones = 0;
    for (Index r : rows) ones += y[r];
    return 2 * ones > static_cast<Index>(rows.size()) ? 1.0 : 0.0;
  }

  bool pure(std::vector<Index> const &rows) const
  {
    return std::all_of(rows.begin(), rows.end(), [&](Index r) { return y[r] == y[rows.front()]; });
  }

  /// Rows arrive sorted by feature f. Score is n_L gini_L + n_R gini_R.
  Split best_split(MatrixXd const &X, std::vector<Index> const &rows, Index f) const
  {
    double const n = static_cast<double>(rows.size());
    double total_ones = 0;
    for (Index r : rows) total_ones += y[r];
    auto weighted = [](double count, double ones) {
      double const zeros = count - ones;
      return count - (ones * ones + zeros * zeros) / count;
    };
    Split best;
    double left_ones = 0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      left_ones += y[rows[i]];
      double const a = X(rows[i], f), b = X(rows[i + 1], f);
      if (!(a < b)) continue;
      double const nl = static_cast<double>(i + 1);
      double const score = weighted(nl, left_ones) + weighted(n - nl, total_ones - left_ones);
      if (score < best.score) best = {f, midpoint(a, b), score};
    }
    return best;
  }
};

/// Squared-error splits on residuals; leaves take the Newton step sum(g) / sum(h).
struct NewtonCriterion
{
  VectorXd const &residual;
  VectorXd const &hessian;

  double leaf_value(std::vector<Index> const &rows) const
  {
    double g = 0, h = 0;
    for (Index r : rows) {
      g += residual[r];
      h += hessian[r];
    }
    return g / std::max(h, 1e-12);
  }

  bool pure(std::vector<Index> const &rows) const
  {
    return std::all_of(rows.begin(), rows.end(), [&](Index r) { return residual[r] == residual[rows.front()]; });
  }

  Split best_split(MatrixXd const &X, std::vector<Index> const &rows, Index f) const
  {
    double const n = static_cast<double>(rows.size());
    double total = 0;
    for (Index r : rows) total += residual[r];
    Split best;
    double left = 0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      left += residual[rows[i]];
      double const a = X(rows[i], f), b = X(rows[i + 1], f);
      if (!(a < b)) continue;
      double const nl = static_cast<double>(i + 1);
      double const right = total - left;
      double const score = -(left * left / nl + right * right / (n - nl));
      if (score < best.score) best = {f, midpoint(a, b), score};
    }
    return best;
  }
};

std::vector<Index> all_rows(Index n)
{
  std::vector<Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), Index{0});
  return rows;
}

void require_both_classes(LabelVector const &y, BaselineKind kind)
{
  Index const ones = (y.array() == 1).count();
  if (ones == 0 || ones == y.size()) {
    throw std::invalid_argument(std::string(to_string(kind)) + ": training labels contain a single class");
  }
}

double sigmoid(double z)
{
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

LogisticModel fit_logistic(MatrixXd const &X, LabelVector const &y, BaselineParams const &p)
{
  if (!(p.learning_rate > 0) || p.epochs < 0 || p.l2 < 0) throw std::invalid_argument("logistic_regression: invalid hyperparameters");
  Index const n = X.rows();
  VectorXd const t = y.cast<double>();
  LogisticModel m;
  m.weights = VectorXd::Zero(X.cols());
  auto loss = [&] {
    VectorXd const z = (X * m.weights).array() + m.bias;
    double sum = 0;
    for (Index i = 0; i < n; ++i) {
      // log(1 + e^z) - t z, computed stably.
      double const zi = z[i];
      sum += (zi > 0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi))) - t[i] * zi;
    }
    return sum / static_cast<double>(n) + 0.5 * p.l2 * m.weights.squaredNorm();
  };
  for (int e = 0; e < p.epochs; ++e) {
    m.loss_history.push_back(loss());
    VectorXd const z = (X * m.weights).array() + m.bias;
    VectorXd const err = z.unaryExpr(&sigmoid) - t;
    VectorXd const gw = X.transpose() * err / static_cast<double>(n) + p.l2 * m.weights;
    double const gb = err.mean();
    m.weights -= p.learning_rate * gw;
    m.bias -= p.learning_rate * gb;
  }
  m.loss_history.push_back(loss());
  return m;
}

GaussianNbModel fit_gaussian_nb(MatrixXd const &X, LabelVector const &y, BaselineParams const &p)
{
  GaussianNbModel m;
  m.mean = MatrixXd::Zero(2, X.cols());
  m.variance = MatrixXd::Zero(2, X.cols());
  double const epsilon = p.var_smoothing * std::max(((X.rowwise() - X.colwise().mean()).array().square().colwise().mean()).maxCoeff(), 0.0);
  for (int c = 0; c < 2; ++c) {
    std::vector<Index> rows;
    for (Index i = 0; i < X.rows(); ++i)
      if (y[i] == c) rows.push_back(i);
    MatrixXd const Xc = X(rows, Eigen::all);
    m.mean.row(c) = Xc.colwise().mean();
    m.variance.row(c) = (Xc.rowwise() - m.mean.row(c)).array().square().colwise().mean();
    m.variance.row(c).array() += epsilon;
    m.log_prior[c] = std::log(static_cast<double>(rows.size()) / static_cast<double>(X.rows()));
  }
  // Constant features with zero smoothing would divide by zero.
  m.variance = m.variance.cwiseMax(1e-300);
  return m;
}

int predict_nb_row(GaussianNbModel const &m, Eigen::Ref<VectorXd const> const &x)
{
  double lp[2];
  for (int c = 0; c < 2; ++c) {
    auto const var = m.variance.row(c).transpose().array();
    lp[c] = m.log_prior[c] - 0.5 * ((2 * std::numbers::pi * var).log() + (x.array() - m.mean.row(c).transpose().array()).square() / var).sum();
  }
  return lp[1] > lp[0] ? 1 : 0;
}

int predict_knn_row(KnnModel const &m, Eigen::Ref<VectorXd const> const &x)
{
  Index const n = m.X.rows();
  std::vector<std::pair<double, Index>> d(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = {(m.X.row(i).transpose() - x).squaredNorm(), i};
  auto const k = static_cast<std::size_t>(std::min<Index>(m.k, n));
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  std::size_t ones = 0;
  for (std::size_t i = 0; i < k; ++i) ones += static_cast<std::size_t>(m.y[d[i].second]);
  return 2 * ones > k ? 1 : 0;
}

ForestModel fit_forest(MatrixXd const &X, LabelVector const &y, BaselineParams const &p)
{
  if (p.trees < 1) throw std::invalid_argument("random_forest: need at least one tree");
  Index const n = X.rows();
  int const m = p.max_features == 0 ? std::max(1, static_cast<int>(std::sqrt(static_cast<double>(X.cols()))))
                                    : p.max_features;
  GiniCriterion const gini{y};
  ForestModel f;
  for (int t = 0; t < p.trees; ++t) {
    std::uint64_t const tree_seed = mix_seed(p.seed, static_cast<std::uint64_t>(t));
    std::vector<Index> rows = all_rows(n);
    if (p.bootstrap) {
      std::mt19937_64 rng(mix_seed(tree_seed, 0xb005));
      std::uniform_int_distribution<Index> pick(0, n - 1);
      for (auto &r : rows) r = pick(rng);
    }
    f.trees.push_back(TreeBuilder<GiniCriterion>(X, gini, p.max_depth, m, tree_seed).build(std::move(rows)));
  }
  return f;
}

BoostModel fit_boost(MatrixXd const &X, LabelVector const &y, BaselineParams const &p)
{
  if (p.rounds < 0 || !(p.boost_learning_rate > 0)) throw std::invalid_argument("gradient_boosting: invalid hyperparameters");
  Index const n = X.rows();
  VectorXd const t = y.cast<double>();
  double const prior = std::clamp(t.mean(), 1e-12, 1.0 - 1e-12);
  BoostModel b;
  b.base_score = std::log(prior / (1.0 - prior));
  b.learning_rate = p.boost_learning_rate;
  VectorXd F = VectorXd::Constant(n, b.base_score);
  for (int round = 0; round < p.rounds; ++round) {
    VectorXd const prob = F.unaryExpr(&sigmoid);
    VectorXd const residual = t - prob;
    VectorXd const hessian = prob.array() * (1.0 - prob.array());
    NewtonCriterion const crit{residual, hessian};
    b.trees.push_back(TreeBuilder<NewtonCriterion>(X, crit, p.boost_depth, -1, 0).build(all_rows(n)));
    for (Index i = 0; i < n; ++i) F[i] += b.learning_rate * b.trees.back().evaluate(X.row(i).transpose());
  }
  return b;
}

} // namespace

Tree fit_classification_tree(MatrixXd const &X, LabelVector const &y, std::vector<Index> const &rows, int max_depth,
                             int max_features, std::uint64_t seed)
{
  GiniCriterion const gini{y};
  return TreeBuilder<GiniCriterion>(X, gini, max_depth, max_features, seed).build(rows);
}

BaselineModel train_baseline(BaselineKind kind, MatrixXd const &X, LabelVector const &y, BaselineParams const &p)
{
  if (X.rows() == 0 || X.cols() == 0) throw std::invalid_argument(std::string(to_string(kind)) + ": empty training data");
  if (y.size() != X.rows()) throw std::invalid_argument(std::string(to_string(kind)) + ": label count mismatch");
  if ((y.array() != 0 && y.array() != 1).any()) throw std::invalid_argument(std::string(to_string(kind)) + ": labels must be 0 or 1");

  BaselineModel out;
  out.kind = kind;
  out.features = X.cols();
  switch (kind) {
  case BaselineKind::LogisticRegression:
    require_both_classes(y, kind);
    out.model = fit_logistic(X, y, p);
    break;
  case BaselineKind::Knn:
    if (p.neighbors < 1) throw std::invalid_argument("knn: neighbors must be at least 1");
    out.model = KnnModel{X, y, p.neighbors};
    break;
  case BaselineKind::GaussianNb:
    require_both_classes(y, kind);
    if (p.var_smoothing < 0) throw std::invalid_argument("gaussian_nb: var_smoothing must be non-negative");
    out.model = fit_gaussian_nb(X, y, p);
    break;
  case BaselineKind::DecisionTree:
    out.model = fit_classification_tree(X, y, all_rows(X.rows()), p.max_depth);
    break;
  case BaselineKind::RandomForest:
    out.model = fit_forest(X, y, p);
    break;
  case BaselineKind::GradientBoosting:
    if (p.boost_depth < 1) throw std::invalid_argument("gradient_boosting: depth must be at least 1");
    out.model = fit_boost(X, y, p);
    break;
  }
  return out;
}

LabelVector predict_baseline(BaselineModel const &model, MatrixXd const &X)
{
  if (X.cols() != model.features) throw std::invalid_argument("predict: feature count does not match training");
  LabelVector out(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    VectorXd const x = X.row(i).transpose();
    out[i] = std::visit(
      [&](auto const &m) -> int {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LogisticModel>) {
          return m.weights.dot(x) + m.bias > 0 ? 1 : 0;
        } else if constexpr (std::is_same_v<M, KnnModel>) {
          return predict_knn_row(m, x);
        } else if constexpr (std::is_same_v<M, GaussianNbModel>) {
          return predict_nb_row(m, x);
        } else if constexpr (std::is_same_v<M, Tree>) {
          return m.evaluate(x) > 0.5 ? 1 : 0;
        } else if constexpr (std::is_same_v<M, ForestModel>) {
          std::size_t ones = 0;
          for (auto const &t : m.trees) ones += t.evaluate(x) > 0.5 ? 1 : 0;
          return 2 * ones > m.trees.size() ? 1 : 0;
        } else {
          double F = m.base_score;
          for (auto const &t : m.trees) F += m.learning_rate * t.evaluate(x);
          return F > 0 ? 1 : 0;
        }
      },
      model.model);
  }
  return out;
}

} // namespace qstock
