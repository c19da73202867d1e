#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "portprep/povm.hpp"
#include "portprep/states.hpp"

namespace portprep {

/// Standard port-based teleportation baseline: maximally entangled resource
/// plus the pretty good measurement.
struct PgmSpec {
  int d = 2;
  int num_ports = 1;
  double pinv_cutoff = tol::kPinvCutoff;
};

inline RegisterLayout pgm_layout(int d, int num_ports) {
  std::vector<Register> regs;
  regs.push_back({"A0", d});
  for (const auto& label : port_labels("A", num_ports)) {
    regs.push_back({label, d});
  }
  return RegisterLayout(std::move(regs));
}

/// Square-root measurement M_x = rho^{-1/2} sigma_x rho^{-1/2} on the input
/// register and Alice's resource halves, with signals
/// sigma_x = (1/d^{N-1}) phi+_{A0 Ax} (x) I. The operator rho = sum_x sigma_x
/// is rank deficient for N >= d, so the deficit I - sum_x M_x is split
/// uniformly over the N outcomes to preserve port symmetry.
inline Povm pgm_povm(const PgmSpec& spec,
                     Index dense_budget = kDefaultDenseBudget) {
  if (spec.d < 2 || spec.num_ports < 1) {
    throw DomainError("PGM needs d >= 2 and N >= 1");
  }
  const Index dim = checked_dense_dim(spec.d, spec.num_ports + 1,
                                      dense_budget);
  const RegisterLayout layout = pgm_layout(spec.d, spec.num_ports);
  const double port_norm =
      std::pow(double(spec.d), double(spec.num_ports - 1));

  std::vector<Matrix> signals;
  signals.reserve(static_cast<std::size_t>(spec.num_ports));
  Matrix rho = Matrix::Zero(dim, dim);
  for (int x = 1; x <= spec.num_ports; ++x) {
    const Matrix pair_projector =
        max_entangled(spec.d, "A0", "A" + std::to_string(x)).projector();
    const std::vector<std::string> pair = {"A0", "A" + std::to_string(x)};
    Matrix signal = embed_operator(pair_projector, pair, layout) / port_norm;
    rho += signal;
    signals.push_back(std::move(signal));
  }

  const Matrix root_inverse = pinv_sqrt(rho, spec.pinv_cutoff);
  std::vector<Matrix> raw;
  raw.reserve(signals.size());
  Matrix total = Matrix::Zero(dim, dim);
  for (const Matrix& signal : signals) {
    Matrix element = root_inverse * signal * root_inverse;
    element = (element + element.adjoint()) / 2.0;
    total += element;
    raw.push_back(std::move(element));
  }
  const Matrix deficit =
      (Matrix::Identity(dim, dim) - total) / double(spec.num_ports);

  std::vector<HermitianOperator> elements;
  std::vector<int> outcomes;
  for (int x = 1; x <= spec.num_ports; ++x) {
    Matrix element = raw[static_cast<std::size_t>(x - 1)] + deficit;
    const Eigensystem eig = eigensystem(element);
    if (eig.values.minCoeff() < -1e-9) {
      throw NumericError("PGM element has eigenvalue " +
                         std::to_string(eig.values.minCoeff()));
    }
    elements.emplace_back(layout, std::move(element));
    outcomes.push_back(x);
  }
  return Povm(layout, std::move(elements), std::move(outcomes));
}

/// Entanglement fidelity of the standard protocol: the channel acts on half
/// of phi+ held in a reference register, Bob keeps the announced port.
inline double pbt_entanglement_fidelity(const PgmSpec& spec,
                                        Index dense_budget =
                                            kDefaultDenseBudget) {
  checked_dense_dim(spec.d, 2 * spec.num_ports + 2, dense_budget);
  const Povm povm = pgm_povm(spec, dense_budget);

  const StateVector input = max_entangled(spec.d, "R", "A0");
  const StateVector resource =
      resource_state({spec.d, spec.num_ports}, dense_budget);
  const StateVector joint = tensor(input, resource);

  std::vector<std::string> alice = {"A0"};
  for (const auto& label : port_labels("A", spec.num_ports)) {
    alice.push_back(label);
  }

  const Vector reference_pair = max_entangled(spec.d, "R", "B").amplitudes();
  double fidelity_sum = 0.0;
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const Matrix root = sqrt_psd(povm.element(i).matrix());
    const Vector post =
        apply_to_registers(root, alice, joint.layout(), joint.amplitudes());
    const std::vector<std::string> keep = {
        "R", "B" + std::to_string(povm.outcome(i))};
    auto [kept_layout, unnormalized] =
        reduced_density_matrix(joint.layout(), post, keep);
    fidelity_sum += state_overlap(reference_pair, unnormalized);
  }
  return fidelity_sum;
}

/// Optimal probabilistic PBT success probability with maximally entangled
/// resources, p = N / (N - 1 + d^2).
inline double prob_pbt_formula(int d, int num_ports) {
  if (d < 2 || num_ports < 1) {
    throw DomainError("probabilistic PBT formula needs d >= 2 and N >= 1");
  }
  return double(num_ports) / double(num_ports - 1 + d * d);
}

/// Entanglement fidelity of the deterministic protocol obtained from a
/// probabilistic one by announcing a random port on failure.
inline double fidelity_from_prob(double p, int d) {
  if (p < 0.0 || p > 1.0) {
    throw DomainError("probability must lie in [0, 1]");
  }
  if (d < 2) {
    throw DomainError("fidelity_from_prob needs d >= 2");
  }
  return p + (1.0 - p) / double(d * d);
}

/// Existence bound for the standard deterministic protocol,
/// F >= 1 - (d^2 - 1)/N (non-vacuous only for N > d^2 - 1).
inline double pbt_standard_fidelity_bound(int d, int num_ports) {
  return 1.0 - double(d * d - 1) / double(num_ports);
}

}  // namespace portprep
