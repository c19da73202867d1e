#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "portprep/pbsp.hpp"

namespace portprep {

/// Memory sizing for a hybrid processor at target error epsilon. Memory
/// dimensions grow as d^(2N) and overflow fixed-width integers quickly, so
/// they are carried and compared as base-2 logarithms throughout.
struct MemoryPlan {
  int d = 2;
  double epsilon = 0.0;
  int num_ports = 0;          // N = max(1, ceil(d ln(1/eps^2)))
  double log2_memory = 0.0;   // 2 N log2(d)
  double log2_bound = 0.0;    // 4 d ln(d) log2(1/eps), the real-valued-N bound
  double log2_slack = 0.0;    // 2 log2(d), the cost of taking the ceiling
};

inline MemoryPlan plan_memory(int d, double epsilon) {
  if (d < 2) {
    throw DomainError("memory plan needs d >= 2");
  }
  if (!(epsilon > 0.0) || epsilon >= 1.0) {
    throw DomainError("memory plan needs 0 < epsilon < 1");
  }
  MemoryPlan plan;
  plan.d = d;
  plan.epsilon = epsilon;
  const double exact = double(d) * std::log(1.0 / (epsilon * epsilon));
  plan.num_ports = std::max(1, static_cast<int>(std::ceil(exact)));
  plan.log2_memory = 2.0 * plan.num_ports * std::log2(double(d));
  plan.log2_bound =
      4.0 * double(d) * std::log(double(d)) * std::log2(1.0 / epsilon);
  plan.log2_slack = 2.0 * std::log2(double(d));
  return plan;
}

/// A programmable hybrid processor: the deterministic preparation protocol
/// run on N copies of the program state (I (x) U) phi+_d.
struct HybridProcessor {
  int d = 2;
  int num_ports = 1;
  Matrix program_unitary;

  double log2_memory() const {
    return 2.0 * num_ports * std::log2(double(d));
  }
};

inline HybridProcessor make_processor(const Matrix& unitary, int num_ports) {
  if (!is_unitary(unitary)) {
    throw DomainError("processor program must be unitary within tolerance");
  }
  if (num_ports < 1) {
    throw DomainError("processor needs at least one port");
  }
  return HybridProcessor{static_cast<int>(unitary.rows()), num_ports,
                         unitary};
}

/// Channel output on the data register for classical input psi. Uses the
/// exact product structure of the measurement, so the d^(2N) memory is never
/// materialized: the output is the two-term mixture
/// F U|psi><psi|U^+ + (1-F) U (I - |psi><psi|) U^+ / (d-1), F = 1-(1-1/d)^N.
inline DensityOperator apply_processor(const StateVector& psi,
                                       const HybridProcessor& proc) {
  if (static_cast<int>(psi.dim()) != proc.d) {
    throw DomainError("input description dimension does not match processor");
  }
  const double fid = success_probability_formula(proc.d, proc.num_ports);
  const Matrix& u = proc.program_unitary;
  const Matrix rotated = u * psi.projector() * u.adjoint();
  Matrix output = fid * rotated;
  if (proc.d > 1) {
    const Matrix orthogonal =
        (Matrix::Identity(proc.d, proc.d) - rotated) / double(proc.d - 1);
    output += (1.0 - fid) * orthogonal;
  }
  return DensityOperator(RegisterLayout::single("D", proc.d),
                         (output + output.adjoint()) / 2.0);
}

/// Guaranteed upper bound (1-1/d)^(N/2) on the trace distance between the
/// processor output and U|psi><psi|U^+, from sqrt(1-F).
inline double trace_error(const HybridProcessor& proc) {
  if (proc.d < 1 || proc.num_ports < 0) {
    throw DomainError("invalid processor parameters");
  }
  return std::pow(1.0 - 1.0 / double(proc.d), double(proc.num_ports) / 2.0);
}

// ---------------------------------------------------------------------------
// Random access codes from hybrid processors
//
// A d-dimensional processor programmed with the Boolean-function unitary U_f
// recovers any bit f(x) from the program state: run it on |x>|0> and measure
// the answer qubit. This encodes d/2 bits into log2(m) qubits of memory.

struct QracInstance {
  int k = 1;                    // index bits; data dimension d = 2^(k+1)
  std::vector<int> truth_table; // 2^k bits
  double epsilon = 0.0;
  int d = 4;
  int num_ports = 0;
  double log2_memory = 0.0;
  double fidelity = 0.0;        // 1 - (1-1/d)^N

  /// Probability of recovering bit x from the program state; identical for
  /// every index by the symmetry of the construction:
  /// F + (1-F)(d/2 - 1)/(d - 1).
  double guess_probability(int x) const {
    if (x < 0 || x >= static_cast<int>(truth_table.size())) {
      throw DomainError("bit index out of range");
    }
    return fidelity +
           (1.0 - fidelity) * (double(d) / 2.0 - 1.0) / double(d - 1);
  }

  double min_guess_probability() const { return guess_probability(0); }
  double success_threshold() const { return 1.0 - 2.0 * epsilon; }

  HybridProcessor processor() const {
    return make_processor(boolean_unitary(truth_table, k), num_ports);
  }
};

inline QracInstance build_qrac(const std::vector<int>& truth_table, int k,
                               double epsilon) {
  if (k < 1) {
    throw DomainError("QRAC needs k >= 1");
  }
  if (!(epsilon > 0.0) || epsilon >= 0.25) {
    throw DomainError("QRAC needs 0 < epsilon < 1/4");
  }
  if (truth_table.size() != (std::size_t(1) << k)) {
    throw DomainError("truth table length does not match 2^k");
  }
  QracInstance instance;
  instance.k = k;
  instance.truth_table = truth_table;
  instance.epsilon = epsilon;
  instance.d = 1 << (k + 1);
  const MemoryPlan plan = plan_memory(instance.d, epsilon);
  instance.num_ports = plan.num_ports;
  instance.log2_memory = plan.log2_memory;
  instance.fidelity =
      success_probability_formula(instance.d, instance.num_ports);
  return instance;
}

/// Classical input |x>|0> of the processor run that recovers bit x.
inline StateVector qrac_input(int d, int x) {
  if (d < 4 || d % 2 != 0) {
    throw DomainError("QRAC data dimension must be an even power of two");
  }
  if (x < 0 || 2 * x >= d) {
    throw DomainError("bit index out of range");
  }
  return StateVector::basis_state(RegisterLayout::single("D", d),
                                  Index(2) * x);
}

/// Two-outcome measurement on the memory space whose statistics reproduce
/// measuring the answer qubit of the processor output: the Kraus pullback
/// M_x^y = sum_j M'_j(psi_x) (x) (I (x) |y><y|) placed at port j. Dense, so
/// only small N is feasible.
inline Povm qrac_measurement_povm(const HybridProcessor& proc, int x,
                                  Index dense_budget = kDefaultDenseBudget) {
  const int d = proc.d;
  const int n = proc.num_ports;
  checked_dense_dim(d, 2 * n, dense_budget);
  const RegisterLayout memory = resource_layout(d, n);
  const StateVector input = qrac_input(d, x);
  const Povm alice = det_povm(input, n, dense_budget);
  const std::vector<std::string> alice_labels = port_labels("A", n);

  std::vector<HermitianOperator> elements;
  std::vector<int> outcomes;
  for (int y = 0; y < 2; ++y) {
    Matrix answer = Matrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
      if ((i & 1) == y) {
        answer(i, i) = 1.0;
      }
    }
    Matrix element = Matrix::Zero(memory.total_dim(), memory.total_dim());
    for (std::size_t j = 0; j < alice.size(); ++j) {
      std::vector<std::string> span_labels = alice_labels;
      span_labels.push_back("B" + std::to_string(alice.outcome(j)));
      const Matrix block =
          Eigen::kroneckerProduct(alice.element(j).matrix(), answer);
      element += embed_operator(block, span_labels, memory);
    }
    elements.emplace_back(memory, (element + element.adjoint()) / 2.0);
    outcomes.push_back(y);
  }
  return Povm(memory, std::move(elements), std::move(outcomes));
}

/// Dense oracle for the processor channel on an arbitrary memory state:
/// Alice's measurement on the A half, the announced port relabeled as the
/// data output. Returns the d x d output state (unnormalized terms summed
/// over outcomes, total trace 1).
inline Matrix dense_processor_channel(const HybridProcessor& proc, int x,
                                      const Matrix& memory_state,
                                      Index dense_budget =
                                          kDefaultDenseBudget) {
  const int d = proc.d;
  const int n = proc.num_ports;
  checked_dense_dim(d, 2 * n, dense_budget);
  const RegisterLayout memory = resource_layout(d, n);
  if (memory_state.rows() != memory.total_dim()) {
    throw LayoutError("memory state dimension mismatch");
  }
  const StateVector input = qrac_input(d, x);
  const Povm alice = det_povm(input, n, dense_budget);
  const std::vector<std::string> alice_labels = port_labels("A", n);

  Matrix output = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < alice.size(); ++j) {
    const Matrix full = embed_operator(alice.element(j).matrix(),
                                       alice_labels, memory);
    const std::vector<std::string> keep = {
        "B" + std::to_string(alice.outcome(j))};
    auto [kept_layout, reduced] =
        partial_trace_matrix(memory, full * memory_state, keep);
    output += reduced;
  }
  return (output + output.adjoint()) / 2.0;
}

}  // namespace portprep
