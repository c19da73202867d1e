#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "portprep/linalg.hpp"
#include "portprep/rng.hpp"

namespace portprep {

inline constexpr Index kDefaultDenseBudget = Index(1) << 20;

/// N independent maximally entangled qudit pairs, one per port.
struct ResourceSpec {
  int d = 2;
  int num_ports = 1;
};

/// d^exponent, guarded against the dense budget.
inline Index checked_dense_dim(int d, int exponent, Index budget) {
  if (d < 1 || exponent < 0) {
    throw DomainError("invalid dimension parameters");
  }
  Index dim = 1;
  for (int i = 0; i < exponent; ++i) {
    if (dim > budget / d) {
      throw CapacityError("dense dimension " + std::to_string(d) + "^" +
                          std::to_string(exponent) + " exceeds budget " +
                          std::to_string(budget));
    }
    dim *= d;
  }
  if (dim > budget) {
    throw CapacityError("dense dimension exceeds budget");
  }
  return dim;
}

inline std::vector<std::string> port_labels(const std::string& prefix, int n) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    labels.push_back(prefix + std::to_string(i));
  }
  return labels;
}

/// Layout A1..AN, B1..BN with every register of dimension d.
inline RegisterLayout resource_layout(int d, int num_ports) {
  std::vector<Register> regs;
  regs.reserve(static_cast<std::size_t>(2 * num_ports));
  for (const auto& label : port_labels("A", num_ports)) {
    regs.push_back({label, d});
  }
  for (const auto& label : port_labels("B", num_ports)) {
    regs.push_back({label, d});
  }
  return RegisterLayout(std::move(regs));
}

/// |phi+_d> = (1/sqrt d) sum_x |xx> over two labeled registers.
inline StateVector max_entangled(int d, const std::string& label_a = "A",
                                 const std::string& label_b = "B") {
  if (d < 2) {
    throw DomainError("maximally entangled state needs dimension >= 2");
  }
  RegisterLayout layout({Register{label_a, d}, Register{label_b, d}});
  Vector amps = Vector::Zero(Index(d) * d);
  const double amp = 1.0 / std::sqrt(double(d));
  for (Index x = 0; x < d; ++x) {
    amps(x * d + x) = amp;
  }
  return StateVector(std::move(layout), std::move(amps));
}

/// Tensor product of phi+_d over the pairs (A_i, B_i), stored in the grouped
/// register order A1..AN, B1..BN.
inline StateVector resource_state(const ResourceSpec& spec,
                                  Index dense_budget = kDefaultDenseBudget) {
  if (spec.d < 2 || spec.num_ports < 1) {
    throw DomainError("resource state needs d >= 2 and N >= 1");
  }
  const Index half_dim = checked_dense_dim(spec.d, spec.num_ports,
                                           dense_budget);
  checked_dense_dim(spec.d, 2 * spec.num_ports, dense_budget);
  RegisterLayout layout = resource_layout(spec.d, spec.num_ports);
  Vector amps = Vector::Zero(half_dim * half_dim);
  const double amp = 1.0 / std::sqrt(double(half_dim));
  for (Index a = 0; a < half_dim; ++a) {
    amps(a * half_dim + a) = amp;
  }
  return StateVector(std::move(layout), std::move(amps));
}

/// Haar-random pure state on a single register of dimension d.
inline StateVector haar_state(int d, SeededRng& rng,
                              const std::string& label = "D") {
  if (d < 1) {
    throw DomainError("state dimension must be positive");
  }
  Vector amps(d);
  for (Index i = 0; i < d; ++i) {
    amps(i) = rng.next_complex_gaussian();
  }
  return StateVector::normalized(RegisterLayout::single(label, d),
                                 std::move(amps));
}

/// Random full-rank density operator from a normalized Ginibre product.
inline DensityOperator random_density(int d, SeededRng& rng,
                                      const std::string& label = "D") {
  if (d < 1) {
    throw DomainError("state dimension must be positive");
  }
  Matrix ginibre(d, d);
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < d; ++c) {
      ginibre(r, c) = rng.next_complex_gaussian();
    }
  }
  Matrix rho = ginibre * ginibre.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(RegisterLayout::single(label, d),
                         (rho + rho.adjoint()) / 2.0);
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the triangular
/// factor's diagonal phases multiplied back in. Plain orthonormalization is
/// not Haar-distributed.
inline Matrix haar_unitary(int d, SeededRng& rng) {
  if (d < 1) {
    throw DomainError("unitary dimension must be positive");
  }
  Matrix ginibre(d, d);
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < d; ++c) {
      ginibre(r, c) = rng.next_complex_gaussian();
    }
  }
  Eigen::HouseholderQR<Matrix> qr(ginibre);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < d; ++i) {
    const Complex pivot = r(i, i);
    const double magnitude = std::abs(pivot);
    const Complex phase = magnitude > 0.0 ? pivot / magnitude : Complex(1.0);
    q.col(i) *= phase;
  }
  return q;
}

inline bool is_unitary(const Matrix& u, double tolerance = tol::kHermitian) {
  if (u.rows() != u.cols()) {
    return false;
  }
  const Matrix gram = u.adjoint() * u;
  return (gram - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <=
         tolerance;
}

/// Choi-type program state: the port resource with U applied to every B_i.
inline StateVector program_state(const Matrix& unitary, int num_ports,
                                 Index dense_budget = kDefaultDenseBudget) {
  if (!is_unitary(unitary)) {
    throw DomainError("program state requires a unitary within tolerance");
  }
  const int d = static_cast<int>(unitary.rows());
  StateVector state = resource_state({d, num_ports}, dense_budget);
  Vector amps = state.amplitudes();
  for (const auto& label : port_labels("B", num_ports)) {
    amps = apply_to_registers(unitary, {label}, state.layout(), amps);
  }
  return StateVector(state.layout(), std::move(amps));
}

/// Permutation unitary |x>|y> -> |x>|y XOR f(x)> for a Boolean function f
/// given as its 2^k-entry truth table. Acts on dimension 2^{k+1} with the
/// answer qubit least significant.
inline Matrix boolean_unitary(const std::vector<int>& truth_table, int k) {
  if (k < 1) {
    throw DomainError("boolean_unitary requires k >= 1");
  }
  const Index inputs = Index(1) << k;
  if (static_cast<Index>(truth_table.size()) != inputs) {
    throw DomainError("truth table length " +
                      std::to_string(truth_table.size()) +
                      " does not match 2^" + std::to_string(k));
  }
  const Index dim = inputs * 2;
  Matrix u = Matrix::Zero(dim, dim);
  for (Index x = 0; x < inputs; ++x) {
    const Index bit = truth_table[static_cast<std::size_t>(x)] ? 1 : 0;
    for (Index y = 0; y < 2; ++y) {
      u(x * 2 + (y ^ bit), x * 2 + y) = 1.0;
    }
  }
  return u;
}

}  // namespace portprep
