#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qstock/types.hpp"

namespace qstock {

enum class Entanglement
{
  Linear,
  Circular,
  Full,
  Pairwise,
};

std::string_view to_string(Entanglement e);
Entanglement parse_entanglement(std::string_view text);

using QubitPair = std::pair<int, int>;
using EntanglementLayers = std::vector<std::vector<QubitPair>>;

struct KernelSpec
{
  int qubits = 1;
  int reps = 2;
  Entanglement scheme = Entanglement::Linear;

  /// Throws unless 1 <= qubits <= kMaxQubits and reps >= 1.
  void validate() const;
};

inline constexpr int kMaxQubits = 16;

/// Qubit 0 is the least-significant bit of the basis index.
using Statevector = Eigen::VectorXcd;

EntanglementLayers entanglement_pairs(int qubits, Entanglement scheme);

/// ZZ feature map: `reps` times, Hadamard on every qubit followed by P(2 x_i)
/// on each qubit and, for each entangling pair, CX(i, j) P(2 (pi - x_i)(pi - x_j)) CX(i, j).
/// Angles are expected in [0, pi].
Statevector feature_map_state(Eigen::Ref<VectorXd const> const &x, KernelSpec const &spec);

/// |<phi(z)|phi(x)>|^2
double kernel_entry(Eigen::Ref<VectorXd const> const &x, Eigen::Ref<VectorXd const> const &z, KernelSpec const &spec);

/// Rows of A against rows of B. Entries are independent, so any `threads`
/// value produces bit-identical output.
MatrixXd kernel_matrix(MatrixXd const &A, MatrixXd const &B, KernelSpec const &spec, int threads = 1);

/// Training Gram matrix: states computed once, upper triangle mirrored.
MatrixXd gram_matrix(MatrixXd const &A, KernelSpec const &spec, int threads = 1);

} // namespace qstock
