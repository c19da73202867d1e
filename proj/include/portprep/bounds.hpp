#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "portprep/pbsp.hpp"

namespace portprep {

inline constexpr double kBoundTolerance = 1e-10;

/// Binary entropy, base 2, continuously extended to h(0) = h(1) = 0.
inline double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) {
    throw DomainError("binary entropy needs p in [0, 1]");
  }
  double h = 0.0;
  if (p > 0.0) {
    h -= p * std::log2(p);
  }
  if (p < 1.0) {
    h -= (1.0 - p) * std::log2(1.0 - p);
  }
  return h;
}

/// Minimum number of code qubits for an (n, m, p) random access code,
/// m >= n (1 - h(p)).
inline double nayak_min_qubits(double n, double p) {
  return n * (1.0 - binary_entropy(p));
}

/// log2 of the minimum memory dimension of a d-dimensional processor with
/// error epsilon: (d/2)(1 - h(2 epsilon)). Vacuous at epsilon >= 1/2.
inline double uphp_lower_bound_log2(int d, double epsilon) {
  if (d < 2) {
    throw DomainError("processor bound needs d >= 2");
  }
  if (epsilon < 0.0 || epsilon >= 0.5) {
    throw DomainError("processor bound needs epsilon in [0, 1/2)");
  }
  return double(d) / 2.0 * (1.0 - binary_entropy(2.0 * epsilon));
}

inline double uphp_lower_bound(int d, double epsilon) {
  return std::pow(2.0, uphp_lower_bound_log2(d, epsilon));
}

struct BoundVerdict {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  double slack = 0.0;
};

inline BoundVerdict make_bound_verdict(std::string name, double lhs,
                                       double rhs) {
  BoundVerdict verdict;
  verdict.name = std::move(name);
  verdict.lhs = lhs;
  verdict.rhs = rhs;
  verdict.slack = rhs - lhs;
  verdict.satisfied = lhs <= rhs + kBoundTolerance;
  return verdict;
}

/// Fidelity bound for deterministic preparation with N independent resource
/// states: 1 - h(sqrt(1 - F)) <= 4 N log2(d) / d.
inline BoundVerdict pbsp_fidelity_bound_check(int d, int num_ports,
                                              double fidelity_achieved) {
  if (fidelity_achieved < 0.0 || fidelity_achieved > 1.0) {
    throw DomainError("fidelity must lie in [0, 1]");
  }
  const double lhs =
      1.0 - binary_entropy(std::sqrt(1.0 - fidelity_achieved));
  const double rhs =
      4.0 * double(num_ports) * std::log2(double(d)) / double(d);
  return make_bound_verdict("pbsp-fidelity-bound", lhs, rhs);
}

// ---------------------------------------------------------------------------
// Non-signaling certificates
//
// Bob checks whether any of his halves holds the target, with
// M_bot = (x)_i (I - |psi><psi|)_{B_i} and M_top = I - M_bot. His statistics
// must be identical before and after Alice's measurement; for the subset-sum
// measurement the protocol saturates the resulting bound exactly.

namespace detail {

inline Matrix kron_power(const Matrix& factor, int count) {
  Matrix out = factor;
  for (int i = 1; i < count; ++i) {
    out = Eigen::kroneckerProduct(out, factor).eval();
  }
  return out;
}

}  // namespace detail

struct ProbNonsignalingCertificate {
  double p_before = 0.0;        // Bob alone sees the target somewhere
  double p_after = 0.0;         // same event after Alice's measurement
  double abort_overlap = 0.0;   // abort outcome and Bob still sees it
  double protocol_success = 0.0;
  bool agrees = false;          // |p_before - p_after| within tolerance
  bool decomposition_ok = false;
  bool dominates = false;       // p_after >= protocol success
};

inline ProbNonsignalingCertificate nonsignaling_prob_certificate(
    const StateVector& psi, int d, int num_ports,
    Index dense_budget = kDefaultDenseBudget) {
  if (static_cast<int>(psi.dim()) != d) {
    throw DomainError("input description dimension mismatch");
  }
  const StateVector resource = resource_state({d, num_ports}, dense_budget);
  const RegisterLayout& layout = resource.layout();
  const Vector& r = resource.amplitudes();
  const std::vector<std::string> alice = port_labels("A", num_ports);
  const std::vector<std::string> bob = port_labels("B", num_ports);

  const Matrix single_miss = Matrix::Identity(d, d) - psi.projector();
  const Matrix all_miss = detail::kron_power(single_miss, num_ports);
  const Matrix any_hit =
      Matrix::Identity(all_miss.rows(), all_miss.cols()) - all_miss;

  ProbNonsignalingCertificate cert;
  cert.p_before =
      r.dot(apply_to_registers(any_hit, bob, layout, r)).real();

  const Povm povm = prob_povm(psi, num_ports, dense_budget);
  double after = 0.0;
  double success = 0.0;
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const Vector measured =
        apply_to_registers(povm.element(i).matrix(), alice, layout, r);
    const double joint =
        r.dot(apply_to_registers(any_hit, bob, layout, measured)).real();
    after += joint;
    if (povm.outcome(i) == 0) {
      cert.abort_overlap = joint;
    } else {
      success += r.dot(measured).real();
    }
  }
  cert.p_after = after;
  cert.protocol_success = success;
  cert.agrees = std::abs(cert.p_before - cert.p_after) <= kBoundTolerance;
  cert.decomposition_ok =
      std::abs(cert.p_after - cert.abort_overlap - cert.protocol_success) <=
      kBoundTolerance;
  cert.dominates = cert.p_after >= cert.protocol_success - kBoundTolerance;
  return cert;
}

struct FidNonsignalingCertificate {
  double residual_direct = 0.0;   // 1 - F via per-outcome Uhlmann fidelities
  double residual_sum = 0.0;      // 1 - F via the orthogonal-component sum
  double failure_bound = 0.0;     // (1 - 1/d)^N
  double marginal_residual = 0.0; // non-signaling marginal identity deviation
  bool agrees = false;
  bool saturates = false;
};

inline FidNonsignalingCertificate nonsignaling_fid_certificate(
    const StateVector& psi, int d, int num_ports,
    Index dense_budget = kDefaultDenseBudget) {
  if (static_cast<int>(psi.dim()) != d) {
    throw DomainError("input description dimension mismatch");
  }
  const StateVector resource = resource_state({d, num_ports}, dense_budget);
  const RegisterLayout& layout = resource.layout();
  const Vector& r = resource.amplitudes();
  const std::vector<std::string> alice = port_labels("A", num_ports);

  const Povm povm = det_povm(psi, num_ports, dense_budget);
  std::vector<Vector> posts;
  posts.reserve(povm.size());
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const Matrix root = sqrt_psd(povm.element(i).matrix());
    posts.push_back(apply_to_registers(root, alice, layout, r));
  }

  FidNonsignalingCertificate cert;
  const Matrix miss = Matrix::Identity(d, d) - psi.projector();
  const DensityOperator target =
      DensityOperator(RegisterLayout::single("T", d), psi.projector());

  double weighted_fidelity = 0.0;
  double orthogonal_sum = 0.0;
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const std::vector<std::string> keep = {
        "B" + std::to_string(povm.outcome(i))};
    auto [kept_layout, unnormalized] =
        reduced_density_matrix(layout, posts[i], keep);
    const double probability = unnormalized.trace().real();
    const DensityOperator conditional(
        RegisterLayout::single("T", d), unnormalized / probability);
    weighted_fidelity += probability * fidelity(conditional, target);
    orthogonal_sum += (miss * unnormalized).trace().real();
  }
  cert.residual_direct = 1.0 - weighted_fidelity;
  cert.residual_sum = orthogonal_sum;
  cert.failure_bound =
      std::pow(1.0 - 1.0 / double(d), double(num_ports));

  // For every kept port, summing the post-measurement marginals over all
  // outcomes must reproduce the untouched marginal I/d.
  double marginal_residual = 0.0;
  const Matrix uniform = Matrix::Identity(d, d) / double(d);
  for (int x = 1; x <= num_ports; ++x) {
    const std::vector<std::string> keep = {"B" + std::to_string(x)};
    Matrix summed = Matrix::Zero(d, d);
    for (const Vector& post : posts) {
      auto [kept_layout, unnormalized] =
          reduced_density_matrix(layout, post, keep);
      summed += unnormalized;
    }
    marginal_residual = std::max(
        marginal_residual, (summed - uniform).cwiseAbs().maxCoeff());
  }
  cert.marginal_residual = marginal_residual;

  cert.agrees =
      std::abs(cert.residual_direct - cert.residual_sum) <= kBoundTolerance;
  cert.saturates =
      std::abs(cert.residual_sum - cert.failure_bound) <= kBoundTolerance;
  return cert;
}

/// Average fidelity from entanglement fidelity, f = (F d + 1) / (d + 1).
inline double avg_from_entanglement_fidelity(double entanglement_fidelity,
                                             int d) {
  if (entanglement_fidelity < 0.0 || entanglement_fidelity > 1.0) {
    throw DomainError("fidelity must lie in [0, 1]");
  }
  if (d < 2) {
    throw DomainError("average fidelity relation needs d >= 2");
  }
  return (entanglement_fidelity * double(d) + 1.0) / double(d + 1);
}

}  // namespace portprep
