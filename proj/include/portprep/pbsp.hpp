#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "portprep/povm.hpp"
#include "portprep/states.hpp"

namespace portprep {

enum class PbspVariant { kProbabilistic, kDeterministic };

/// One measurement outcome: its label (0 = abort), probability, and the
/// conditional state on Bob's selected port (absent for abort).
struct ProtocolOutcome {
  int outcome = 0;
  double probability = 0.0;
  std::optional<DensityOperator> bob_state;
};

struct ChannelResult {
  std::vector<ProtocolOutcome> outcomes;
  double success_probability = 0.0;
  double worst_case_fidelity_estimate = 0.0;
  bool degenerate = false;
};

// ---------------------------------------------------------------------------
// Closed forms

/// p = 1 - (1 - 1/d)^N. Degenerate inputs N = 0 (p = 0) and d = 1 (p = 1)
/// are accepted here; the protocol runners reject them.
inline double success_probability_formula(int d, int num_ports) {
  if (d < 1 || num_ports < 0) {
    throw DomainError("success probability needs d >= 1, N >= 0");
  }
  return 1.0 - std::pow(1.0 - 1.0 / double(d), double(num_ports));
}

/// The same probability through the per-outcome binomial sum
/// (N/d) sum_i C(N-1, i) / (i+1) (1/d)^i (1 - 1/d)^(N-1-i);
/// an independent algebraic route to success_probability_formula.
inline double success_probability_binomial(int d, int num_ports) {
  if (d < 1 || num_ports < 1) {
    throw DomainError("binomial route needs d >= 1, N >= 1");
  }
  const double q = 1.0 / double(d);
  double sum = 0.0;
  double binom = 1.0;  // C(N-1, i), updated multiplicatively
  for (int i = 0; i <= num_ports - 1; ++i) {
    sum += binom / double(i + 1) * std::pow(q, i) *
           std::pow(1.0 - q, num_ports - 1 - i);
    binom *= double(num_ports - 1 - i) / double(i + 1);
  }
  return double(num_ports) * q * sum;
}

/// Per-outcome probability of the deterministic variant (equals 1/N).
inline double det_outcome_probability(int d, int num_ports) {
  return success_probability_binomial(d, num_ports) / double(num_ports) +
         std::pow(1.0 - 1.0 / double(d), double(num_ports)) /
             double(num_ports);
}

// ---------------------------------------------------------------------------
// Measurement construction
//
// Every element is diagonal in the product basis built from the single-port
// eigenbasis {|psi*>, orthogonal complement}: the basis index e assigns each
// port either the psi* direction (digit 0) or a complement direction, and the
// element weight depends only on which ports sit in the psi* direction.

/// d x d unitary whose first column spans |psi*>.
inline Matrix conjugate_port_basis(const StateVector& psi) {
  const Vector column = psi.amplitudes().conjugate();
  Eigen::HouseholderQR<Matrix> qr(column);
  Matrix basis = qr.householderQ();
  // householderQ leaves an arbitrary phase on the first column; align it.
  const Complex overlap = basis.col(0).dot(column);
  basis.col(0) *= overlap / std::abs(overlap);
  return basis;
}

namespace detail {

struct PortBasisWeights {
  Matrix product_basis;                      // N-fold Kronecker power of V
  std::vector<std::vector<double>> weights;  // per element, per basis index
};

inline PortBasisWeights pbsp_povm_weights(const StateVector& psi,
                                          int num_ports, PbspVariant variant,
                                          Index dense_budget) {
  if (psi.layout().size() != 1) {
    throw LayoutError("PBSP input description must be a single register");
  }
  const int d = static_cast<int>(psi.dim());
  if (d < 2 || num_ports < 1) {
    throw DomainError("PBSP measurement needs d >= 2 and N >= 1");
  }
  const Index dim = checked_dense_dim(d, num_ports, dense_budget);

  const Matrix single = conjugate_port_basis(psi);
  Matrix product = single;
  for (int i = 1; i < num_ports; ++i) {
    product = Eigen::kroneckerProduct(product, single).eval();
  }

  const std::size_t element_count =
      static_cast<std::size_t>(num_ports) +
      (variant == PbspVariant::kProbabilistic ? 1 : 0);
  std::vector<std::vector<double>> weights(
      element_count, std::vector<double>(static_cast<std::size_t>(dim), 0.0));

  std::vector<int> digits(static_cast<std::size_t>(num_ports), 0);
  for (Index e = 0; e < dim; ++e) {
    Index rest = e;
    int matched = 0;
    for (int i = num_ports - 1; i >= 0; --i) {
      digits[static_cast<std::size_t>(i)] = static_cast<int>(rest % d);
      rest /= d;
      if (digits[static_cast<std::size_t>(i)] == 0) {
        ++matched;
      }
    }
    const double abort_weight = matched == 0 ? 1.0 : 0.0;
    const double share = matched > 0 ? 1.0 / double(matched) : 0.0;
    const double det_extra =
        variant == PbspVariant::kDeterministic
            ? abort_weight / double(num_ports)
            : 0.0;
    for (int x = 1; x <= num_ports; ++x) {
      const bool in_set = digits[static_cast<std::size_t>(x - 1)] == 0;
      const double w = (in_set ? share : 0.0) + det_extra;
      const std::size_t slot = static_cast<std::size_t>(
          variant == PbspVariant::kProbabilistic ? x : x - 1);
      weights[slot][static_cast<std::size_t>(e)] = w;
    }
    if (variant == PbspVariant::kProbabilistic) {
      weights[0][static_cast<std::size_t>(e)] = abort_weight;
    }
  }
  return {std::move(product), std::move(weights)};
}

inline Povm povm_from_weights(const PortBasisWeights& data, int d,
                              int num_ports, PbspVariant variant) {
  RegisterLayout layout = resource_layout(d, num_ports).subset(
      port_labels("A", num_ports));
  std::vector<HermitianOperator> elements;
  std::vector<int> outcomes;
  for (std::size_t slot = 0; slot < data.weights.size(); ++slot) {
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(
        data.weights[slot].data(),
        static_cast<Eigen::Index>(data.weights[slot].size()));
    Matrix element = data.product_basis * w.asDiagonal() *
                     data.product_basis.adjoint();
    elements.emplace_back(layout, (element + element.adjoint()) / 2.0);
    outcomes.push_back(variant == PbspVariant::kProbabilistic
                           ? static_cast<int>(slot)
                           : static_cast<int>(slot) + 1);
  }
  return Povm(std::move(layout), std::move(elements), std::move(outcomes));
}

}  // namespace detail

/// N+1 outcome measurement for probabilistic preparation: outcome 0 aborts,
/// outcome x finds the state in port x.
inline Povm prob_povm(const StateVector& psi, int num_ports,
                      Index dense_budget = kDefaultDenseBudget) {
  const auto data = detail::pbsp_povm_weights(
      psi, num_ports, PbspVariant::kProbabilistic, dense_budget);
  return detail::povm_from_weights(data, static_cast<int>(psi.dim()),
                                   num_ports, PbspVariant::kProbabilistic);
}

/// N outcome measurement for deterministic preparation: the abort element is
/// spread evenly over the ports, M'_x = M_x + (1/N) M_0.
inline Povm det_povm(const StateVector& psi, int num_ports,
                     Index dense_budget = kDefaultDenseBudget) {
  const auto data = detail::pbsp_povm_weights(
      psi, num_ports, PbspVariant::kDeterministic, dense_budget);
  return detail::povm_from_weights(data, static_cast<int>(psi.dim()),
                                   num_ports, PbspVariant::kDeterministic);
}

// ---------------------------------------------------------------------------
// Exact dense evaluation

namespace detail {

inline constexpr double kProbabilityFloor = 1e-14;

inline ChannelResult run_dense(const StateVector& psi,
                               const ResourceSpec& spec, PbspVariant variant,
                               Index dense_budget) {
  if (static_cast<int>(psi.dim()) != spec.d) {
    throw DomainError("input description dimension does not match resource");
  }
  const StateVector resource = resource_state(spec, dense_budget);
  const Povm povm = variant == PbspVariant::kProbabilistic
                        ? prob_povm(psi, spec.num_ports, dense_budget)
                        : det_povm(psi, spec.num_ports, dense_budget);
  const std::vector<std::string> alice = port_labels("A", spec.num_ports);

  ChannelResult result;
  double success = 0.0;
  double fidelity_sum = 0.0;
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const int outcome = povm.outcome(i);
    const Matrix root = sqrt_psd(povm.element(i).matrix());
    const Vector post = apply_to_registers(root, alice, resource.layout(),
                                           resource.amplitudes());
    const double probability = post.squaredNorm();
    ProtocolOutcome entry{outcome, probability, std::nullopt};
    if (outcome > 0) {
      success += probability;
      if (probability > kProbabilityFloor) {
        const std::vector<std::string> keep = {"B" + std::to_string(outcome)};
        auto [layout, matrix] =
            reduced_density_matrix(resource.layout(), post, keep);
        entry.bob_state =
            DensityOperator(std::move(layout), matrix / probability);
        fidelity_sum += probability * state_overlap(psi.amplitudes(),
                                                    entry.bob_state->matrix());
      }
    }
    result.outcomes.push_back(std::move(entry));
  }
  result.success_probability = success;
  result.worst_case_fidelity_estimate = fidelity_sum;
  return result;
}

}  // namespace detail

/// Dense evaluation of the probabilistic protocol with the N+1 outcome
/// measurement on the product resource.
inline ChannelResult run_probabilistic(const StateVector& psi,
                                       const ResourceSpec& spec,
                                       Index dense_budget =
                                           kDefaultDenseBudget) {
  return detail::run_dense(psi, spec, PbspVariant::kProbabilistic,
                           dense_budget);
}

/// Dense evaluation of the deterministic protocol (always outputs a port).
inline ChannelResult run_deterministic(const StateVector& psi,
                                       const ResourceSpec& spec,
                                       Index dense_budget =
                                           kDefaultDenseBudget) {
  return detail::run_dense(psi, spec, PbspVariant::kDeterministic,
                           dense_budget);
}

// ---------------------------------------------------------------------------
// Structured fast path
//
// Each port independently holds the target with probability 1/d; a success
// set S occurs with probability (1/d)^|S| (1-1/d)^(N-|S|) and the announced
// port is uniform within S, reproducing the 1/|S| weights of the subset-sum
// measurement. This never materializes the d^(2N) resource.

inline ChannelResult structured_run(const StateVector& psi,
                                    const ResourceSpec& spec,
                                    PbspVariant variant) {
  if (static_cast<int>(psi.dim()) != spec.d) {
    throw DomainError("input description dimension does not match resource");
  }
  const int d = spec.d;
  const int n = spec.num_ports;
  if (d < 1 || n < 0) {
    throw DomainError("structured run needs d >= 1 and N >= 0");
  }
  if (variant == PbspVariant::kDeterministic && n < 1) {
    throw DomainError("deterministic protocol needs at least one port");
  }
  ChannelResult result;
  result.degenerate = (d == 1 || n == 0);
  const double p = success_probability_formula(d, n);

  const Matrix target = psi.projector();
  const Matrix orthogonal_mix =
      d > 1 ? ((Matrix::Identity(d, d) - target) / double(d - 1)).eval()
            : Matrix::Zero(d, d);

  if (variant == PbspVariant::kProbabilistic) {
    result.outcomes.push_back({0, 1.0 - p, std::nullopt});
    for (int x = 1; x <= n; ++x) {
      ProtocolOutcome entry{x, p / double(n == 0 ? 1 : n), std::nullopt};
      entry.bob_state = DensityOperator(
          RegisterLayout::single("B" + std::to_string(x), d), target);
      result.outcomes.push_back(std::move(entry));
    }
    result.success_probability = p;
    result.worst_case_fidelity_estimate = p;
  } else {
    const Matrix mixture = p * target + (1.0 - p) * orthogonal_mix;
    for (int x = 1; x <= n; ++x) {
      ProtocolOutcome entry{x, 1.0 / double(n), std::nullopt};
      entry.bob_state = DensityOperator(
          RegisterLayout::single("B" + std::to_string(x), d), mixture);
      result.outcomes.push_back(std::move(entry));
    }
    result.success_probability = 1.0;
    result.worst_case_fidelity_estimate = p;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Monte Carlo sampling

/// Samples the probabilistic protocol: per-port Bernoulli(1/d) success, then
/// a uniform choice among the successful ports (abort when none succeed).
/// Frequencies follow the Born rule of the N+1 outcome measurement.
inline ChannelResult sample_outcomes(const StateVector& psi,
                                     const ResourceSpec& spec,
                                     std::int64_t trials, SeededRng& rng) {
  if (trials < 1) {
    throw DomainError("sampling needs at least one trial");
  }
  if (static_cast<int>(psi.dim()) != spec.d) {
    throw DomainError("input description dimension does not match resource");
  }
  const int n = spec.num_ports;
  const double hit_probability = 1.0 / double(spec.d);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> hits;
  hits.reserve(static_cast<std::size_t>(n));
  for (std::int64_t t = 0; t < trials; ++t) {
    hits.clear();
    for (int port = 1; port <= n; ++port) {
      if (rng.next_bernoulli(hit_probability)) {
        hits.push_back(port);
      }
    }
    if (hits.empty()) {
      ++counts[0];
    } else {
      const std::size_t pick = static_cast<std::size_t>(
          rng.next_below(static_cast<std::uint64_t>(hits.size())));
      ++counts[static_cast<std::size_t>(hits[pick])];
    }
  }

  ChannelResult result;
  const Matrix target = psi.projector();
  for (int x = 0; x <= n; ++x) {
    ProtocolOutcome entry{
        x, double(counts[static_cast<std::size_t>(x)]) / double(trials),
        std::nullopt};
    if (x > 0) {
      entry.bob_state = DensityOperator(
          RegisterLayout::single("B" + std::to_string(x), spec.d), target);
    }
    result.outcomes.push_back(std::move(entry));
  }
  result.success_probability = 1.0 - double(counts[0]) / double(trials);
  result.worst_case_fidelity_estimate = result.success_probability;
  return result;
}

// ---------------------------------------------------------------------------
// Worst-case fidelity estimation

using ProtocolRunner = std::function<ChannelResult(const StateVector&)>;

/// Channel fidelity sum_x p_x <psi| rho_x |psi> over outcomes that deliver a
/// port state; abort contributes zero.
inline double channel_fidelity(const ChannelResult& result,
                               const StateVector& psi) {
  double sum = 0.0;
  for (const auto& entry : result.outcomes) {
    if (entry.bob_state) {
      sum += entry.probability *
             state_overlap(psi.amplitudes(), entry.bob_state->matrix());
    }
  }
  return sum;
}

struct FidelityStats {
  double min_fidelity = std::numeric_limits<double>::infinity();
  double max_fidelity = -std::numeric_limits<double>::infinity();
  double mean_fidelity = 0.0;
  double variance = 0.0;
  int samples = 0;
};

/// Minimum channel fidelity over Haar-sampled inputs. This is an estimate of
/// the worst case, not a certified infimum; for input-independent protocols
/// the variance certifies the estimate numerically.
inline FidelityStats worst_case_fidelity(const ProtocolRunner& runner, int d,
                                         int samples, SeededRng& rng) {
  if (samples < 1) {
    throw DomainError("worst-case estimation needs at least one sample");
  }
  FidelityStats stats;
  double mean = 0.0;
  double m2 = 0.0;
  for (int s = 0; s < samples; ++s) {
    const StateVector psi = haar_state(d, rng);
    const double fid = channel_fidelity(runner(psi), psi);
    stats.min_fidelity = std::min(stats.min_fidelity, fid);
    stats.max_fidelity = std::max(stats.max_fidelity, fid);
    ++stats.samples;
    const double delta = fid - mean;
    mean += delta / double(stats.samples);
    m2 += delta * (fid - mean);
  }
  stats.mean_fidelity = mean;
  stats.variance = stats.samples > 1 ? m2 / double(stats.samples - 1) : 0.0;
  return stats;
}

}  // namespace portprep
