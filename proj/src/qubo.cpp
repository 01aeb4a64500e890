#include "qstock/qubo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

namespace qstock {

QuboProblem::QuboProblem(Index n, std::vector<std::string> names)
  : n_(n), names_(std::move(names))
{
  if (n < 0) throw std::invalid_argument("qubo: negative size");
  if (!names_.empty() && static_cast<Index>(names_.size()) != n) throw std::invalid_argument("qubo: name count mismatch");
}

void QuboProblem::add(Index i, Index j, double weight)
{
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n_) throw std::out_of_range("qubo: index out of range");
  if (!std::isfinite(weight)) throw std::invalid_argument("qubo: non-finite weight");
  terms_[{i, j}] += weight;
}

double QuboProblem::coefficient(Index i, Index j) const
{
  if (i > j) std::swap(i, j);
  auto it = terms_.find({i, j});
  return it == terms_.end() ? 0.0 : it->second;
}

double QuboProblem::max_abs_coefficient() const
{
  double m = 0;
  for (auto const &[ij, w] : terms_) m = std::max(m, std::abs(w));
  return m;
}

MatrixXd QuboProblem::dense() const
{
  MatrixXd q = MatrixXd::Zero(n_, n_);
  for (auto const &[ij, w] : terms_) q(ij.first, ij.second) = w;
  return q;
}

double evaluate(QuboProblem const &qubo, Assignment const &x)
{
  if (static_cast<Index>(x.size()) != qubo.size()) throw std::invalid_argument("evaluate: assignment length mismatch");
  for (auto v : x)
    if (v > 1) throw std::invalid_argument("evaluate: assignment entries must be 0 or 1");
  double sum = 0;
  for (auto const &[ij, w] : qubo.terms()) {
    if (x[static_cast<std::size_t>(ij.first)] && x[static_cast<std::size_t>(ij.second)]) sum += w;
  }
  return sum;
}

namespace {

/// |Pearson| between two columns; 0 when either has zero variance.
double abs_correlation(VectorXd const &a, VectorXd const &b)
{
  VectorXd const da = a.array() - a.mean();
  VectorXd const db = b.array() - b.mean();
  double const na = da.norm(), nb = db.norm();
  if (na == 0 || nb == 0) return 0.0;
  return std::min(1.0, std::abs(da.dot(db)) / (na * nb));
}

struct Unpenalized
{
  VectorXd relevance;
  MatrixXd redundancy;
  double abs_sum = 0;
};

Unpenalized unpenalized_terms(Dataset const &train, double alpha)
{
  if (!(alpha >= 0 && alpha <= 1)) throw std::invalid_argument("feature qubo: alpha must lie in [0, 1]");
  if (train.rows() < 3) throw std::invalid_argument("feature qubo: need at least 3 training rows");
  Index const n = train.cols();
  VectorXd const y = train.y.cast<double>();
  Unpenalized u;
  u.relevance.resize(n);
  u.redundancy = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    u.relevance[i] = -alpha * abs_correlation(train.X.col(i), y);
    u.abs_sum += std::abs(u.relevance[i]);
    for (Index j = i + 1; j < n; ++j) {
      u.redundancy(i, j) = (1 - alpha) * abs_correlation(train.X.col(i), train.X.col(j));
      u.abs_sum += std::abs(u.redundancy(i, j));
    }
  }
  return u;
}

Index cardinality(Assignment const &x)
{
  return std::count(x.begin(), x.end(), std::uint8_t{1});
}

/// Symmetric off-diagonal couplings plus linear terms, for O(1) flip deltas.
struct FlipModel
{
  MatrixXd coupling;
  VectorXd linear;

  explicit FlipModel(QuboProblem const &q)
    : coupling(MatrixXd::Zero(q.size(), q.size())), linear(VectorXd::Zero(q.size()))
  {
    for (auto const &[ij, w] : q.terms()) {
      if (ij.first == ij.second) {
        linear[ij.first] += w;
      } else {
        coupling(ij.first, ij.second) += w;
        coupling(ij.second, ij.first) += w;
      }
    }
  }
};

bool better(double obj_a, Assignment const &a, double obj_b, Assignment const &b)
{
  if (obj_a != obj_b) return obj_a < obj_b;
  return a < b;
}

QuboSolution anneal_once(QuboProblem const &qubo, FlipModel const &model, AnnealParams const &p, double t_hot,
                         std::uint64_t seed)
{
  Index const n = qubo.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Assignment x(static_cast<std::size_t>(n));
  for (auto &v : x) v = static_cast<std::uint8_t>(rng() & 1u);
  VectorXd field = model.linear;
  for (Index i = 0; i < n; ++i)
    if (x[static_cast<std::size_t>(i)]) field += model.coupling.col(i);
  double energy = evaluate(qubo, x);

  Assignment best = x;
  double best_energy = energy;
  double const ratio = p.t_cold / t_hot;
  for (int sweep = 0; sweep < p.sweeps; ++sweep) {
    double const frac = p.sweeps > 1 ? static_cast<double>(sweep) / (p.sweeps - 1) : 1.0;
    double const temperature = t_hot * std::pow(ratio, frac);
    for (Index i = 0; i < n; ++i) {
      auto &xi = x[static_cast<std::size_t>(i)];
      double const delta = xi ? -field[i] : field[i];
      if (delta <= 0 || unit(rng) < std::exp(-delta / temperature)) {
        xi ^= 1u;
        energy += delta;
        if (xi) {
          field += model.coupling.col(i);
        } else {
          field -= model.coupling.col(i);
        }
        if (energy < best_energy - 1e-12) {
          best = x;
          best_energy = energy;
        }
      }
    }
  }
  // Incremental energies drift; report the exact objective.
  return {best, evaluate(qubo, best), QuboSolver::Annealer, true};
}

} // namespace

double cardinality_penalty(Dataset const &train, double alpha)
{
  return 2.0 * unpenalized_terms(train, alpha).abs_sum + 1.0;
}

QuboProblem build_feature_qubo(Dataset const &train, Index k, double alpha, double penalty_scale)
{
  Index const n = train.cols();
  if (k < 1 || k > n) throw std::invalid_argument("feature qubo: k must lie in [1, feature count]");
  auto const u = unpenalized_terms(train, alpha);
  double const lambda = penalty_scale * (2.0 * u.abs_sum + 1.0);

  // lambda (sum x - k)^2 = lambda [(1 - 2k) sum x_i + 2 sum_{i<j} x_i x_j + k^2]
  QuboProblem q(n, train.feature_names);
  for (Index i = 0; i < n; ++i) {
    q.add(i, i, u.relevance[i] + lambda * static_cast<double>(1 - 2 * k));
    for (Index j = i + 1; j < n; ++j) q.add(i, j, u.redundancy(i, j) + 2.0 * lambda);
  }
  return q;
}

QuboSolution solve_exhaustive(QuboProblem const &qubo)
{
  Index const n = qubo.size();
  if (n > kMaxExhaustiveVariables) {
    throw std::invalid_argument("exhaustive solver supports at most " + std::to_string(kMaxExhaustiveVariables) +
                                " variables");
  }
  FlipModel const model(qubo);
  Assignment x(static_cast<std::size_t>(n), 0);
  VectorXd field = model.linear;
  double energy = 0;
  Assignment best = x;
  double best_energy = 0;

  // Gray-code walk: step g flips the bit at the position of g's lowest set bit.
  std::uint64_t const total = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < total; ++g) {
    auto const i = static_cast<Index>(std::countr_zero(g));
    auto &xi = x[static_cast<std::size_t>(i)];
    energy += xi ? -field[i] : field[i];
    xi ^= 1u;
    if (xi) {
      field += model.coupling.col(i);
    } else {
      field -= model.coupling.col(i);
    }
    if (energy <= best_energy + 1e-9) {
      double const exact = evaluate(qubo, x);
      double const exact_best = evaluate(qubo, best);
      if (better(exact, x, exact_best, best)) {
        best = x;
        best_energy = exact;
      }
    }
  }
  return {best, evaluate(qubo, best), QuboSolver::Exhaustive, true};
}

QuboSolution solve_annealer(QuboProblem const &qubo, AnnealParams const &p)
{
  if (p.sweeps < 1 || p.restarts < 1) throw std::invalid_argument("annealer: sweeps and restarts must be at least 1");
  double const t_hot = p.t_hot.value_or(10.0 * qubo.max_abs_coefficient());
  if (!(p.t_cold > 0) || !(t_hot > p.t_cold)) throw std::invalid_argument("annealer: need t_hot > t_cold > 0");
  if (qubo.size() == 0) return {{}, 0.0, QuboSolver::Annealer, true};

  FlipModel const model(qubo);
  std::vector<QuboSolution> runs;
  runs.reserve(static_cast<std::size_t>(p.restarts));
  for (int r = 0; r < p.restarts; ++r) {
    runs.push_back(anneal_once(qubo, model, p, t_hot, mix_seed(p.seed, static_cast<std::uint64_t>(r))));
  }
  return *std::min_element(runs.begin(), runs.end(), [](auto const &a, auto const &b) {
    return better(a.objective, a.assignment, b.objective, b.assignment);
  });
}

FeatureSelection select_features(Dataset const &train, Index k, QuboSolver solver, double alpha, AnnealParams const &params)
{
  FeatureSelection out;
  double scale = 1.0;
  for (int attempt = 0; attempt <= 3; ++attempt, scale *= 2.0) {
    out.qubo = build_feature_qubo(train, k, alpha, scale);
    out.solution = solver == QuboSolver::Exhaustive ? solve_exhaustive(out.qubo) : solve_annealer(out.qubo, params);
    out.solution.feasible = cardinality(out.solution.assignment) == k;
    out.escalations = attempt;
    if (out.solution.feasible) {
      for (Index i = 0; i < out.qubo.size(); ++i)
        if (out.solution.assignment[static_cast<std::size_t>(i)]) out.indices.push_back(i);
      return out;
    }
  }
  throw std::runtime_error("feature selection: solver kept violating the cardinality constraint k = " +
                           std::to_string(k));
}

std::string serialize_qubo(QuboProblem const &qubo)
{
  std::string out = std::to_string(qubo.size()) + "\n";
  char buf[64];
  for (auto const &[ij, w] : qubo.terms()) {
    if (w == 0.0) continue;
    std::snprintf(buf, sizeof buf, "%.17g", w);
    out += std::to_string(ij.first) + " " + std::to_string(ij.second) + " " + buf + "\n";
  }
  return out;
}

QuboProblem parse_qubo(std::string const &text)
{
  std::istringstream in(text);
  long long n = 0;
  if (!(in >> n) || n < 0) throw std::invalid_argument("qubo text: missing or invalid variable count");
  QuboProblem q(static_cast<Index>(n));
  long long i = 0, j = 0;
  std::string weight;
  while (in >> i >> j >> weight) {
    if (i > j || i < 0 || j >= n) throw std::invalid_argument("qubo text: term indices must satisfy 0 <= i <= j < n");
    q.add(static_cast<Index>(i), static_cast<Index>(j), std::stod(weight));
  }
  if (!in.eof()) throw std::invalid_argument("qubo text: malformed term line");
  return q;
}

} // namespace qstock
