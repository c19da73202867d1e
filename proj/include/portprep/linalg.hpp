#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "portprep/errors.hpp"
#include "portprep/layout.hpp"

namespace portprep {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace tol {
inline constexpr double kHermitian = 1e-10;    // max elementwise deviation
inline constexpr double kUnitNorm = 1e-9;      // state vector norm
inline constexpr double kUnitTrace = 1e-9;     // density operator trace
inline constexpr double kPsdClamp = 1e-10;     // relative, clamped to zero
inline constexpr double kPsdReject = 1e-8;     // beyond this: domain error
inline constexpr double kSpectralZero = 1e-14; // relative; below is noise
inline constexpr double kPinvCutoff = 1e-12;   // relative spectral cutoff
inline constexpr double kCompleteness = 1e-10; // POVM sum-to-identity
}  // namespace tol

inline bool is_hermitian(const Matrix& m, double tolerance = tol::kHermitian) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

/// A pure state: unit-norm complex amplitudes over a register layout.
class StateVector {
 public:
  StateVector(RegisterLayout layout, Vector amplitudes)
      : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != layout_.total_dim()) {
      throw LayoutError("amplitude vector of length " +
                        std::to_string(amplitudes_.size()) +
                        " does not match layout " + layout_.to_string());
    }
    if (std::abs(amplitudes_.norm() - 1.0) > tol::kUnitNorm) {
      throw DomainError("state vector norm " +
                        std::to_string(amplitudes_.norm()) +
                        " is not within tolerance of 1");
    }
  }

  static StateVector normalized(RegisterLayout layout, Vector amplitudes) {
    const double norm = amplitudes.norm();
    if (norm <= 0.0) {
      throw DomainError("cannot normalize the zero vector");
    }
    return StateVector(std::move(layout), amplitudes / norm);
  }

  static StateVector basis_state(RegisterLayout layout, Index index) {
    if (index < 0 || index >= layout.total_dim()) {
      throw DomainError("basis index " + std::to_string(index) +
                        " out of range for layout " + layout.to_string());
    }
    Vector amps = Vector::Zero(layout.total_dim());
    amps(index) = 1.0;
    return StateVector(std::move(layout), std::move(amps));
  }

  const RegisterLayout& layout() const { return layout_; }
  const Vector& amplitudes() const { return amplitudes_; }
  Index dim() const { return amplitudes_.size(); }

  /// Entrywise complex conjugate in the computational basis.
  StateVector conjugated() const {
    return StateVector(layout_, amplitudes_.conjugate());
  }

  Matrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  RegisterLayout layout_;
  Vector amplitudes_;
};

/// A Hermitian matrix over a register layout (POVM elements, projectors,
/// observables). No trace constraint.
class HermitianOperator {
 public:
  HermitianOperator(RegisterLayout layout, Matrix matrix)
      : layout_(std::move(layout)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != layout_.total_dim() ||
        matrix_.cols() != layout_.total_dim()) {
      throw LayoutError("matrix shape does not match layout " +
                        layout_.to_string());
    }
    if (!is_hermitian(matrix_)) {
      throw DomainError("matrix is not Hermitian within tolerance");
    }
  }

  static HermitianOperator identity(RegisterLayout layout) {
    const Index dim = layout.total_dim();
    return HermitianOperator(std::move(layout), Matrix::Identity(dim, dim));
  }

  const RegisterLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }

 private:
  RegisterLayout layout_;
  Matrix matrix_;
};

/// A trace-one positive semidefinite matrix over a register layout.
/// Hermiticity and trace are validated at construction; positivity is
/// enforced by the spectral routines that consume it.
class DensityOperator {
 public:
  DensityOperator(RegisterLayout layout, Matrix matrix)
      : layout_(std::move(layout)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != layout_.total_dim() ||
        matrix_.cols() != layout_.total_dim()) {
      throw LayoutError("matrix shape does not match layout " +
                        layout_.to_string());
    }
    if (!is_hermitian(matrix_)) {
      throw DomainError("density operator is not Hermitian within tolerance");
    }
    const double trace = matrix_.trace().real();
    if (std::abs(trace - 1.0) > tol::kUnitTrace) {
      throw DomainError("density operator trace " + std::to_string(trace) +
                        " is not within tolerance of 1");
    }
  }

  static DensityOperator pure(const StateVector& psi) {
    return DensityOperator(psi.layout(), psi.projector());
  }

  static DensityOperator maximally_mixed(RegisterLayout layout) {
    const Index dim = layout.total_dim();
    return DensityOperator(std::move(layout),
                           Matrix::Identity(dim, dim) / double(dim));
  }

  const RegisterLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }

  HermitianOperator as_hermitian() const {
    return HermitianOperator(layout_, matrix_);
  }

 private:
  RegisterLayout layout_;
  Matrix matrix_;
};

// ---------------------------------------------------------------------------
// Tensor products

inline StateVector tensor(const StateVector& a, const StateVector& b) {
  RegisterLayout layout = a.layout().concat(b.layout());
  Vector amps = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes());
  return StateVector(std::move(layout), std::move(amps));
}

inline HermitianOperator tensor(const HermitianOperator& a,
                                const HermitianOperator& b) {
  RegisterLayout layout = a.layout().concat(b.layout());
  Matrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return HermitianOperator(std::move(layout), std::move(m));
}

inline DensityOperator tensor(const DensityOperator& a,
                              const DensityOperator& b) {
  RegisterLayout layout = a.layout().concat(b.layout());
  Matrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return DensityOperator(std::move(layout), std::move(m));
}

// ---------------------------------------------------------------------------
// Partial trace

/// Core partial trace on a raw matrix; returns the matrix over the kept
/// registers (in original layout order) together with their layout.
inline std::pair<RegisterLayout, Matrix> partial_trace_matrix(
    const RegisterLayout& layout, const Matrix& matrix,
    std::span<const std::string> keep) {
  if (keep.empty()) {
    throw LayoutError("partial trace must keep at least one register");
  }
  const RegisterLayout kept_layout = layout.subset(keep);
  const std::vector<std::string> kept_labels = kept_layout.labels();
  const std::vector<std::string> traced_labels = layout.complement(kept_labels);
  const auto kept_positions = layout.positions_of(kept_labels);
  const auto traced_positions = layout.positions_of(traced_labels);
  const std::vector<Index> kept_offsets =
      subindex_offsets(layout, kept_positions);
  const std::vector<Index> traced_offsets =
      subindex_offsets(layout, traced_positions);

  const Index kept_dim = kept_layout.total_dim();
  Matrix out = Matrix::Zero(kept_dim, kept_dim);
  for (Index r = 0; r < kept_dim; ++r) {
    for (Index c = 0; c < kept_dim; ++c) {
      Complex sum = 0.0;
      for (const Index t : traced_offsets) {
        sum += matrix(kept_offsets[static_cast<std::size_t>(r)] + t,
                      kept_offsets[static_cast<std::size_t>(c)] + t);
      }
      out(r, c) = sum;
    }
  }
  return {kept_layout, std::move(out)};
}

inline DensityOperator partial_trace(const DensityOperator& rho,
                                     std::span<const std::string> keep) {
  auto [layout, matrix] =
      partial_trace_matrix(rho.layout(), rho.matrix(), keep);
  return DensityOperator(std::move(layout), std::move(matrix));
}

inline HermitianOperator partial_trace(const HermitianOperator& op,
                                       std::span<const std::string> keep) {
  auto [layout, matrix] = partial_trace_matrix(op.layout(), op.matrix(), keep);
  return HermitianOperator(std::move(layout), std::move(matrix));
}

inline DensityOperator partial_trace(
    const DensityOperator& rho, std::initializer_list<std::string> keep) {
  return partial_trace(rho, std::span<const std::string>(keep.begin(),
                                                         keep.size()));
}

/// Reduced density matrix of a (possibly unnormalized) vector, without
/// forming the full projector: out(r, c) = sum_t v[r + t] conj(v[c + t]).
inline std::pair<RegisterLayout, Matrix> reduced_density_matrix(
    const RegisterLayout& layout, const Vector& v,
    std::span<const std::string> keep) {
  const RegisterLayout kept_layout = layout.subset(keep);
  const std::vector<std::string> kept_labels = kept_layout.labels();
  const std::vector<std::string> traced_labels = layout.complement(kept_labels);
  const std::vector<Index> kept_offsets =
      subindex_offsets(layout, layout.positions_of(kept_labels));
  const std::vector<Index> traced_offsets =
      subindex_offsets(layout, layout.positions_of(traced_labels));

  const Index kept_dim = kept_layout.total_dim();
  Matrix out = Matrix::Zero(kept_dim, kept_dim);
  for (Index r = 0; r < kept_dim; ++r) {
    for (Index c = 0; c < kept_dim; ++c) {
      Complex sum = 0.0;
      for (const Index t : traced_offsets) {
        sum += v(kept_offsets[static_cast<std::size_t>(r)] + t) *
               std::conj(v(kept_offsets[static_cast<std::size_t>(c)] + t));
      }
      out(r, c) = sum;
    }
  }
  return {kept_layout, std::move(out)};
}

inline DensityOperator reduced_density(const StateVector& psi,
                                       std::span<const std::string> keep) {
  auto [layout, matrix] =
      reduced_density_matrix(psi.layout(), psi.amplitudes(), keep);
  return DensityOperator(std::move(layout), std::move(matrix));
}

// ---------------------------------------------------------------------------
// Applying operators to register subsets

/// Applies `op` (given over the registers named by `labels`, in that order)
/// to a state, leaving the other registers untouched. The result is NOT
/// renormalized, so non-unitary `op` yields a subnormalized vector.
inline Vector apply_to_registers(const Matrix& op,
                                 std::span<const std::string> labels,
                                 const RegisterLayout& layout,
                                 const Vector& amplitudes) {
  const auto positions = layout.positions_of(labels);
  Index sub_dim = 1;
  for (std::size_t p : positions) {
    sub_dim *= layout.at(p).dim;
  }
  if (op.rows() != sub_dim || op.cols() != sub_dim) {
    throw LayoutError("operator dimension does not match selected registers");
  }
  const std::vector<std::string> label_vec(labels.begin(), labels.end());
  const std::vector<std::string> rest = layout.complement(label_vec);
  const std::vector<Index> sub_offsets = subindex_offsets(layout, positions);
  const std::vector<Index> rest_offsets =
      subindex_offsets(layout, layout.positions_of(rest));

  Vector out = Vector::Zero(amplitudes.size());
  Vector gathered(sub_dim);
  for (const Index base : rest_offsets) {
    for (Index s = 0; s < sub_dim; ++s) {
      gathered(s) = amplitudes(base + sub_offsets[static_cast<std::size_t>(s)]);
    }
    Vector transformed = op * gathered;
    for (Index s = 0; s < sub_dim; ++s) {
      out(base + sub_offsets[static_cast<std::size_t>(s)]) = transformed(s);
    }
  }
  return out;
}

inline Vector apply_to_registers(const Matrix& op,
                                 std::initializer_list<std::string> labels,
                                 const RegisterLayout& layout,
                                 const Vector& amplitudes) {
  return apply_to_registers(
      op, std::span<const std::string>(labels.begin(), labels.size()), layout,
      amplitudes);
}

/// Embeds `op` (over `labels`) into the full layout as op (x) identity.
inline Matrix embed_operator(const Matrix& op,
                             std::span<const std::string> labels,
                             const RegisterLayout& layout) {
  const auto positions = layout.positions_of(labels);
  Index sub_dim = 1;
  for (std::size_t p : positions) {
    sub_dim *= layout.at(p).dim;
  }
  if (op.rows() != sub_dim || op.cols() != sub_dim) {
    throw LayoutError("operator dimension does not match selected registers");
  }
  const std::vector<std::string> label_vec(labels.begin(), labels.end());
  const std::vector<std::string> rest = layout.complement(label_vec);
  const std::vector<Index> sub_offsets = subindex_offsets(layout, positions);
  const std::vector<Index> rest_offsets =
      subindex_offsets(layout, layout.positions_of(rest));

  const Index dim = layout.total_dim();
  Matrix out = Matrix::Zero(dim, dim);
  for (const Index base : rest_offsets) {
    for (Index r = 0; r < sub_dim; ++r) {
      for (Index c = 0; c < sub_dim; ++c) {
        out(base + sub_offsets[static_cast<std::size_t>(r)],
            base + sub_offsets[static_cast<std::size_t>(c)]) = op(r, c);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral routines

struct Eigensystem {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // columns
};

inline Eigensystem eigensystem(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigendecomposition failed to converge");
  }
  return Eigensystem{solver.eigenvalues(), solver.eigenvectors()};
}

/// Spectral function application with PSD clamping: eigenvalues in
/// [-reject, 0) are clamped to zero, below -reject is a domain error.
/// Eigenvalues within spectral noise of zero (relative kSpectralZero) are
/// treated as exact zeros so roots do not amplify solver noise.
/// `reject` is relative to the largest eigenvalue magnitude.
template <typename Fn>
Matrix map_psd_spectrum(const Matrix& hermitian, Fn&& fn,
                        double reject = tol::kPsdReject) {
  const Eigensystem eig = eigensystem(hermitian);
  const double magnitude = eig.values.cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, magnitude);
  Eigen::VectorXd mapped(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    double value = eig.values(i);
    if (value < -reject * scale) {
      throw DomainError("operator has negative eigenvalue " +
                        std::to_string(value) + " beyond PSD tolerance");
    }
    if (value < tol::kSpectralZero * magnitude) {
      value = 0.0;
    }
    mapped(i) = fn(value);
  }
  return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

inline Matrix sqrt_psd(const Matrix& hermitian) {
  return map_psd_spectrum(hermitian, [](double v) { return std::sqrt(v); });
}

inline HermitianOperator sqrt_psd(const HermitianOperator& op) {
  return HermitianOperator(op.layout(), sqrt_psd(op.matrix()));
}

/// Pseudo-inverse square root: lambda^{-1/2} on the support (eigenvalues
/// above cutoff * lambda_max), zero on the kernel.
inline Matrix pinv_sqrt(const Matrix& hermitian,
                        double cutoff = tol::kPinvCutoff) {
  const Eigensystem eig = eigensystem(hermitian);
  const double lambda_max = eig.values.maxCoeff();
  if (eig.values.minCoeff() < -tol::kPsdReject * std::max(1.0, lambda_max)) {
    throw DomainError("pinv_sqrt input has negative eigenvalue " +
                      std::to_string(eig.values.minCoeff()));
  }
  const double threshold = cutoff * std::max(lambda_max, 0.0);
  Eigen::VectorXd mapped(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    mapped(i) =
        eig.values(i) > threshold ? 1.0 / std::sqrt(eig.values(i)) : 0.0;
  }
  return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

inline HermitianOperator pinv_sqrt(const HermitianOperator& op,
                                   double cutoff = tol::kPinvCutoff) {
  return HermitianOperator(op.layout(), pinv_sqrt(op.matrix(), cutoff));
}

// ---------------------------------------------------------------------------
// Distance and fidelity measures

inline void require_equal_layouts(const RegisterLayout& a,
                                  const RegisterLayout& b) {
  if (a != b) {
    throw LayoutError("layout mismatch: " + a.to_string() + " vs " +
                      b.to_string());
  }
}

/// Uhlmann fidelity F(rho, sigma) = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double fidelity(const DensityOperator& rho,
                       const DensityOperator& sigma) {
  require_equal_layouts(rho.layout(), sigma.layout());
  const Matrix sqrt_rho = sqrt_psd(rho.matrix());
  const Matrix inner = sqrt_rho * sigma.matrix() * sqrt_rho;
  const Eigensystem eig = eigensystem((inner + inner.adjoint()) / 2.0);
  const double magnitude = eig.values.cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, magnitude);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) < -tol::kPsdReject * scale) {
      throw DomainError("fidelity input is not PSD within tolerance");
    }
    if (eig.values(i) > tol::kSpectralZero * magnitude) {
      sum += std::sqrt(eig.values(i));
    }
  }
  return std::min(sum * sum, 1.0);
}

/// Overlap form of the fidelity for a pure first argument.
inline double pure_fidelity(const StateVector& psi,
                            const DensityOperator& rho) {
  require_equal_layouts(psi.layout(), rho.layout());
  const double overlap =
      (psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes())(0)
          .real();
  return std::clamp(overlap, 0.0, 1.0);
}

inline double pure_fidelity(const StateVector& psi, const StateVector& phi) {
  require_equal_layouts(psi.layout(), phi.layout());
  return std::min(std::norm(psi.amplitudes().dot(phi.amplitudes())), 1.0);
}

/// <v|M|v> for a raw amplitude vector; used where operands live on
/// different (but dimension-compatible) register labels.
inline double state_overlap(const Vector& v, const Matrix& m) {
  return (v.adjoint() * m * v)(0).real();
}

/// Trace distance (1/2) ||rho - sigma||_1.
inline double trace_distance(const DensityOperator& rho,
                             const DensityOperator& sigma) {
  require_equal_layouts(rho.layout(), sigma.layout());
  const Eigensystem eig = eigensystem(rho.matrix() - sigma.matrix());
  return std::min(0.5 * eig.values.cwiseAbs().sum(), 1.0);
}

}  // namespace portprep
