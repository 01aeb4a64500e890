#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qstock/dataset.hpp"
#include "qstock/types.hpp"

namespace qstock {

using Assignment = std::vector<std::uint8_t>;

/// Upper-triangular QUBO: minimize sum_{i <= j} q_ij x_i x_j over x in {0,1}^n.
/// Diagonal terms act linearly because x_i^2 = x_i.
class QuboProblem
{
public:
  QuboProblem() = default;
  explicit QuboProblem(Index n, std::vector<std::string> names = {});

  Index size() const { return n_; }
  std::map<std::pair<Index, Index>, double> const &terms() const { return terms_; }
  std::vector<std::string> const &names() const { return names_; }

  /// Adds `weight` to q_ij; (i, j) is reordered so i <= j.
  void add(Index i, Index j, double weight);
  double coefficient(Index i, Index j) const;
  double max_abs_coefficient() const;

  /// Dense upper-triangular matrix q with Q(x) = x^T q x.
  MatrixXd dense() const;

  bool operator==(QuboProblem const &) const = default;

private:
  Index n_ = 0;
  std::map<std::pair<Index, Index>, double> terms_;
  std::vector<std::string> names_;
};

enum class QuboSolver
{
  Exhaustive,
  Annealer,
};

struct QuboSolution
{
  Assignment assignment;
  double objective = 0;
  QuboSolver solver = QuboSolver::Exhaustive;
  /// Whether the cardinality target (when one applies) is met.
  bool feasible = true;
};

double evaluate(QuboProblem const &qubo, Assignment const &x);

/// Feature-selection QUBO: relevance -alpha |corr(f_i, y)| on the diagonal,
/// redundancy (1 - alpha) |corr(f_i, f_j)| off it, plus the cardinality
/// penalty lambda (sum x - k)^2 without its constant term. lambda is
/// 2 * (sum of |unpenalized weights|) + 1, times `penalty_scale`.
QuboProblem build_feature_qubo(Dataset const &train, Index k, double alpha = 0.5, double penalty_scale = 1.0);

/// The penalty weight chosen by build_feature_qubo for the same inputs.
double cardinality_penalty(Dataset const &train, double alpha = 0.5);

inline constexpr Index kMaxExhaustiveVariables = 24;

/// Enumerates all 2^n assignments; ties go to the lexicographically smallest assignment.
QuboSolution solve_exhaustive(QuboProblem const &qubo);

struct AnnealParams
{
  int sweeps = 1000;
  int restarts = 20;
  /// Defaults to 10 * max |q_ij| when unset.
  std::optional<double> t_hot;
  double t_cold = 1e-3;
  std::uint64_t seed = 0;
};

/// Single-bit-flip Metropolis annealing with a geometric schedule. Restart r
/// draws from mix_seed(seed, r), so adding restarts never worsens the result.
QuboSolution solve_annealer(QuboProblem const &qubo, AnnealParams const &params = {});

struct FeatureSelection
{
  std::vector<Index> indices;
  QuboSolution solution;
  QuboProblem qubo;
  /// Number of lambda doublings that were needed.
  int escalations = 0;
};

/// Builds and solves the feature QUBO, doubling the penalty (up to 3 times)
/// whenever the solver lands off the k-cardinality set.
FeatureSelection select_features(Dataset const &train, Index k, QuboSolver solver, double alpha = 0.5,
                                 AnnealParams const &params = {});

/// `n`, then one `i j weight` line per nonzero term sorted by (i, j), weights with 17 significant digits.
std::string serialize_qubo(QuboProblem const &qubo);
QuboProblem parse_qubo(std::string const &text);

} // namespace qstock
