#include "qstock/quantum_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace qstock {

std::string_view to_string(Entanglement e)
{
  switch (e) {
  case Entanglement::Linear: return "linear";
  case Entanglement::Circular: return "circular";
  case Entanglement::Full: return "full";
  case Entanglement::Pairwise: return "pairwise";
  }
  return "?";
}

Entanglement parse_entanglement(std::string_view text)
{
  for (auto e : {Entanglement::Linear, Entanglement::Circular, Entanglement::Full, Entanglement::Pairwise})
    if (to_string(e) == text) return e;
  throw std::invalid_argument("unknown entanglement scheme '" + std::string(text) + "'");
}

void KernelSpec::validate() const
{
  if (qubits < 1 || qubits > kMaxQubits) {
    throw std::invalid_argument("kernel: qubit count must lie in [1, " + std::to_string(kMaxQubits) + "]");
  }
  if (reps < 1) throw std::invalid_argument("kernel: reps must be at least 1");
}

EntanglementLayers entanglement_pairs(int n, Entanglement scheme)
{
  if (n < 1) throw std::invalid_argument("entanglement_pairs: need at least one qubit");
  if (n == 1) return {};
  std::vector<QubitPair> linear;
  for (int i = 0; i + 1 < n; ++i) linear.emplace_back(i, i + 1);

  switch (scheme) {
  case Entanglement::Linear: return {linear};
  case Entanglement::Circular:
    if (n >= 3) linear.emplace_back(n - 1, 0);
    return {linear};
  case Entanglement::Full: {
    std::vector<QubitPair> all;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) all.emplace_back(i, j);
    return {all};
  }
  case Entanglement::Pairwise: {
    std::vector<QubitPair> even, odd;
    for (int i = 0; i + 1 < n; i += 2) even.emplace_back(i, i + 1);
    for (int i = 1; i + 1 < n; i += 2) odd.emplace_back(i, i + 1);
    EntanglementLayers layers{even};
    if (!odd.empty()) layers.push_back(odd);
    return layers;
  }
  }
  return {};
}

namespace {

/// Every gate after the Hadamards in one repetition is diagonal, so the whole
/// block is a single phase per basis state. Pairs are accumulated in sorted
/// order: the block only depends on the pair multiset, and a canonical sum
/// keeps schemes with equal pair sets bit-identical.
VectorXd diagonal_phases(Eigen::Ref<VectorXd const> const &x, KernelSpec const &spec)
{
  int const n = spec.qubits;
  std::vector<QubitPair> pairs;
  for (auto const &layer : entanglement_pairs(n, spec.scheme))
    for (auto [i, j] : layer) pairs.emplace_back(std::min(i, j), std::max(i, j));
  std::sort(pairs.begin(), pairs.end());

  Index const dim = Index{1} << n;
  VectorXd phase = VectorXd::Zero(dim);
  for (Index b = 0; b < dim; ++b) {
    double p = 0;
    for (int i = 0; i < n; ++i)
      if ((b >> i) & 1) p += 2.0 * x[i];
    for (auto [i, j] : pairs) {
      if (((b >> i) ^ (b >> j)) & 1) p += 2.0 * (std::numbers::pi - x[i]) * (std::numbers::pi - x[j]);
    }
    phase[b] = p;
  }
  return phase;
}

void hadamard_all(Statevector &psi, int n)
{
  double const r = 1.0 / std::numbers::sqrt2;
  Index const dim = psi.size();
  for (int q = 0; q < n; ++q) {
    Index const stride = Index{1} << q;
    for (Index base = 0; base < dim; base += 2 * stride) {
      for (Index k = base; k < base + stride; ++k) {
        auto const a = psi[k], b = psi[k + stride];
        psi[k] = r * (a + b);
        psi[k + stride] = r * (a - b);
      }
    }
  }
}

std::vector<Statevector> states_for(MatrixXd const &points, KernelSpec const &spec)
{
  std::vector<Statevector> out;
  out.reserve(static_cast<std::size_t>(points.rows()));
  for (Index r = 0; r < points.rows(); ++r) out.push_back(feature_map_state(points.row(r).transpose(), spec));
  return out;
}

double overlap(Statevector const &a, Statevector const &b)
{
  return std::norm(a.dot(b));
}

template <typename Fn> void parallel_rows(Index rows, int threads, Fn &&fn)
{
  threads = std::max(1, std::min<int>(threads, static_cast<int>(rows)));
  if (threads == 1) {
    for (Index r = 0; r < rows; ++r) fn(r);
    return;
  }
  std::vector<std::jthread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (Index r = t; r < rows; r += threads) fn(r);
    });
  }
}

} // namespace

Statevector feature_map_state(Eigen::Ref<VectorXd const> const &x, KernelSpec const &spec)
{
  spec.validate();
  if (x.size() != spec.qubits) throw std::invalid_argument("feature map: point dimension does not match qubit count");
  Index const dim = Index{1} << spec.qubits;
  VectorXd const phase = diagonal_phases(x, spec);
  Eigen::VectorXcd diag(dim);
  for (Index b = 0; b < dim; ++b) diag[b] = std::polar(1.0, phase[b]);

  Statevector psi = Statevector::Zero(dim);
  psi[0] = 1.0;
  for (int rep = 0; rep < spec.reps; ++rep) {
    hadamard_all(psi, spec.qubits);
    psi = psi.cwiseProduct(diag);
  }
  return psi / psi.norm();
}

double kernel_entry(Eigen::Ref<VectorXd const> const &x, Eigen::Ref<VectorXd const> const &z, KernelSpec const &spec)
{
  return overlap(feature_map_state(z, spec), feature_map_state(x, spec));
}

MatrixXd kernel_matrix(MatrixXd const &A, MatrixXd const &B, KernelSpec const &spec, int threads)
{
  spec.validate();
  if (A.cols() != spec.qubits || B.cols() != spec.qubits) {
    throw std::invalid_argument("kernel matrix: point dimension does not match qubit count");
  }
  auto const sa = states_for(A, spec);
  auto const sb = states_for(B, spec);
  MatrixXd K(A.rows(), B.rows());
  parallel_rows(A.rows(), threads, [&](Index r) {
    for (Index c = 0; c < B.rows(); ++c) K(r, c) = overlap(sb[static_cast<std::size_t>(c)], sa[static_cast<std::size_t>(r)]);
  });
  return K;
}

MatrixXd gram_matrix(MatrixXd const &A, KernelSpec const &spec, int threads)
{
  spec.validate();
  if (A.cols() != spec.qubits) throw std::invalid_argument("gram matrix: point dimension does not match qubit count");
  auto const s = states_for(A, spec);
  MatrixXd K(A.rows(), A.rows());
  parallel_rows(A.rows(), threads, [&](Index r) {
    for (Index c = r; c < A.rows(); ++c) K(r, c) = overlap(s[static_cast<std::size_t>(c)], s[static_cast<std::size_t>(r)]);
  });
  for (Index r = 0; r < A.rows(); ++r)
    for (Index c = 0; c < r; ++c) K(r, c) = K(c, r);
  return K;
}

} // namespace qstock
