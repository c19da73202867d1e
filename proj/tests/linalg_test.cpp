#include "portprep/linalg.hpp"

#include <gtest/gtest.h>

#include "portprep/states.hpp"
#include "test_util.hpp"

namespace portprep {
namespace {

StateVector qubit_basis(const std::string& label, int index) {
  return StateVector::basis_state(RegisterLayout::single(label, 2), index);
}

TEST(Tensor, BasisStates) {
  const StateVector product = tensor(qubit_basis("A", 0), qubit_basis("B", 1));
  Vector expected(4);
  expected << 0, 1, 0, 0;
  EXPECT_NEAR((product.amplitudes() - expected).norm(), 0.0, 1e-15);
}

TEST(Tensor, IdentityOperators) {
  const auto id_a = HermitianOperator::identity(RegisterLayout::single("A", 3));
  const auto id_b = HermitianOperator::identity(RegisterLayout::single("B", 3));
  const auto product = tensor(id_a, id_b);
  EXPECT_NEAR(
      (product.matrix() - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff(), 0.0,
      1e-15);
  EXPECT_EQ(product.layout().total_dim(), 9);
}

TEST(Tensor, TwoMaxEntangledPairs) {
  const StateVector pair1 = max_entangled(2, "A1", "B1");
  const StateVector pair2 = max_entangled(2, "A2", "B2");
  const StateVector product = tensor(pair1, pair2);
  // A1 B1 A2 B2 ordering: weight 1/2 on 0000, 0011, 1100, 1111.
  Vector expected = Vector::Zero(16);
  expected(0) = 0.5;
  expected(3) = 0.5;
  expected(12) = 0.5;
  expected(15) = 0.5;
  EXPECT_NEAR((product.amplitudes() - expected).norm(), 0.0, 1e-15);
}

TEST(Tensor, DuplicateLabelThrows) {
  EXPECT_THROW(tensor(qubit_basis("A", 0), qubit_basis("A", 1)), LayoutError);
}

TEST(PartialTrace, MaxEntangledMarginal) {
  for (const int d : {2, 3, 5}) {
    const StateVector pair = max_entangled(d);
    const DensityOperator rho = DensityOperator::pure(pair);
    const std::vector<std::string> keep = {"B"};
    const DensityOperator marginal = partial_trace(rho, keep);
    EXPECT_NEAR(testutil::max_abs_diff(marginal.matrix(),
                                       Matrix::Identity(d, d) / double(d)),
                0.0, 1e-12)
        << "d=" << d;
  }
}

TEST(PartialTrace, ProductState) {
  SeededRng rng(11);
  const StateVector psi = haar_state(3, rng, "A");
  const StateVector zero =
      StateVector::basis_state(RegisterLayout::single("B", 2), 0);
  const DensityOperator joint = DensityOperator::pure(tensor(psi, zero));
  const std::vector<std::string> keep = {"A"};
  const DensityOperator marginal = partial_trace(joint, keep);
  EXPECT_NEAR(testutil::max_abs_diff(marginal.matrix(), psi.projector()), 0.0,
              1e-12);
}

// Projecting one half of phi+ onto the conjugate description leaves the
// described state, scaled by 1/d, on the other half.
TEST(PartialTrace, ConjugateProjectionIdentity) {
  SeededRng rng(12);
  for (const int d : {2, 3}) {
    for (int trial = 0; trial < 20; ++trial) {
      const StateVector psi = haar_state(d, rng);
      const StateVector pair = max_entangled(d);
      const Matrix projector = Eigen::kroneckerProduct(
          psi.conjugated().projector(), Matrix::Identity(d, d));
      const Matrix projected =
          projector * DensityOperator::pure(pair).matrix();
      const std::vector<std::string> keep = {"B"};
      auto [layout, marginal] =
          partial_trace_matrix(pair.layout(), projected, keep);
      EXPECT_NEAR(
          testutil::max_abs_diff(marginal, psi.projector() / double(d)), 0.0,
          1e-12)
          << "d=" << d;
    }
  }
}

TEST(PartialTrace, UnknownLabelThrows) {
  const DensityOperator rho = DensityOperator::pure(max_entangled(2));
  const std::vector<std::string> keep = {"C"};
  EXPECT_THROW(partial_trace(rho, keep), LayoutError);
}

TEST(PartialTrace, TracePreservingAndComposable) {
  SeededRng rng(13);
  const RegisterLayout layout(
      {Register{"A", 2}, Register{"B", 3}, Register{"C", 2}});
  Matrix g(12, 12);
  for (Index r = 0; r < 12; ++r) {
    for (Index c = 0; c < 12; ++c) {
      g(r, c) = rng.next_complex_gaussian();
    }
  }
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  const DensityOperator rho(layout, m);

  const std::vector<std::string> keep_ab = {"A", "B"};
  const std::vector<std::string> keep_b = {"B"};
  const DensityOperator step1 = partial_trace(rho, keep_ab);
  const DensityOperator two_step = partial_trace(step1, keep_b);
  const DensityOperator one_step = partial_trace(rho, keep_b);
  EXPECT_NEAR(one_step.matrix().trace().real(), 1.0, 1e-12);
  EXPECT_NEAR(testutil::max_abs_diff(two_step.matrix(), one_step.matrix()),
              0.0, 1e-12);
}

TEST(PartialTrace, Linearity) {
  SeededRng rng(14);
  const RegisterLayout layout({Register{"A", 2}, Register{"B", 2}});
  const Matrix a = testutil::random_hermitian(4, rng);
  const Matrix b = testutil::random_hermitian(4, rng);
  const std::vector<std::string> keep = {"B"};
  auto [l1, ta] = partial_trace_matrix(layout, a, keep);
  auto [l2, tb] = partial_trace_matrix(layout, b, keep);
  auto [l3, tsum] = partial_trace_matrix(layout, 0.25 * a + 2.0 * b, keep);
  EXPECT_NEAR(testutil::max_abs_diff(tsum, 0.25 * ta + 2.0 * tb), 0.0, 1e-12);
}

TEST(Fidelity, SelfIsOne) {
  SeededRng rng(15);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityOperator rho = random_density(4, rng);
    EXPECT_NEAR(fidelity(rho, rho), 1.0, 1e-10);
  }
}

TEST(Fidelity, PureVersusMaximallyMixed) {
  const DensityOperator pure = DensityOperator::pure(qubit_basis("D", 0));
  const DensityOperator mixed =
      DensityOperator::maximally_mixed(RegisterLayout::single("D", 2));
  EXPECT_NEAR(fidelity(pure, mixed), 0.5, 1e-12);
}

TEST(Fidelity, OverlapFormForPureStates) {
  SeededRng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const StateVector psi = haar_state(3, rng);
    const DensityOperator sigma = random_density(3, rng);
    const double full = fidelity(DensityOperator::pure(psi), sigma);
    const double overlap = pure_fidelity(psi, sigma);
    EXPECT_NEAR(full, overlap, 1e-10);
  }
}

TEST(Fidelity, Symmetric) {
  SeededRng rng(17);
  const DensityOperator rho = random_density(3, rng);
  const DensityOperator sigma = random_density(3, rng);
  EXPECT_NEAR(fidelity(rho, sigma), fidelity(sigma, rho), 1e-10);
}

TEST(Fidelity, RejectsNonPsdInput) {
  const RegisterLayout layout = RegisterLayout::single("D", 2);
  Matrix bad(2, 2);
  bad << 1.5, 0.0, 0.0, -0.5;
  const DensityOperator rho(layout, bad);  // Hermitian, trace one, not PSD
  const DensityOperator sigma = DensityOperator::maximally_mixed(layout);
  EXPECT_THROW(fidelity(rho, sigma), DomainError);
}

TEST(TraceDistance, OrthogonalPureStates) {
  const DensityOperator zero = DensityOperator::pure(qubit_basis("D", 0));
  const DensityOperator one = DensityOperator::pure(qubit_basis("D", 1));
  EXPECT_NEAR(trace_distance(zero, one), 1.0, 1e-12);
  EXPECT_NEAR(trace_distance(zero, zero), 0.0, 1e-12);
}

TEST(TraceDistance, FuchsVanDeGraafSandwich) {
  SeededRng rng(18);
  for (int trial = 0; trial < 50; ++trial) {
    const DensityOperator rho = random_density(4, rng);
    const DensityOperator sigma = random_density(4, rng);
    const double fid = fidelity(rho, sigma);
    const double dist = trace_distance(rho, sigma);
    EXPECT_LE(1.0 - std::sqrt(fid), dist + 1e-9);
    EXPECT_LE(dist, std::sqrt(1.0 - fid) + 1e-9);
  }
}

TEST(PinvSqrt, IdentityAndDiagonal) {
  const Matrix id = Matrix::Identity(3, 3);
  EXPECT_NEAR(testutil::max_abs_diff(pinv_sqrt(id), id), 0.0, 1e-12);

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 4.0;
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 0.5;
  EXPECT_NEAR(testutil::max_abs_diff(pinv_sqrt(diag), expected), 0.0, 1e-12);
}

TEST(PinvSqrt, SupportProjector) {
  SeededRng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    // Rank-3 PSD operator on dimension 5.
    Matrix g(5, 3);
    for (Index r = 0; r < 5; ++r) {
      for (Index c = 0; c < 3; ++c) {
        g(r, c) = rng.next_complex_gaussian();
      }
    }
    const Matrix rho = g * g.adjoint();
    const Matrix root_inverse = pinv_sqrt(rho);
    const Matrix projector = root_inverse * rho * root_inverse;
    EXPECT_NEAR(testutil::max_abs_diff(projector * projector, projector), 0.0,
                1e-9);
    // Independent support projector from the eigendecomposition.
    const Eigensystem eig = eigensystem(rho);
    Matrix expected = Matrix::Zero(5, 5);
    const double threshold = 1e-9 * eig.values.maxCoeff();
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      if (eig.values(i) > threshold) {
        expected += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
      }
    }
    EXPECT_NEAR(testutil::max_abs_diff(projector, expected), 0.0, 1e-9);
  }
}

TEST(PinvSqrt, RejectsClearlyNegativeInput) {
  Matrix indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(pinv_sqrt(indefinite), DomainError);
}

TEST(Spectral, ReconstructionUpTo256) {
  SeededRng rng(20);
  for (const int dim : {16, 64, 256}) {
    const Matrix a = testutil::random_hermitian(dim, rng);
    const Eigensystem eig = eigensystem(a);
    const Matrix reconstructed =
        eig.vectors * eig.values.asDiagonal() * eig.vectors.adjoint();
    const double relative = (reconstructed - a).norm() / a.norm();
    EXPECT_LE(relative, 1e-10) << "dim=" << dim;
  }
}

TEST(ApplyToRegisters, MatchesEmbeddedOperator) {
  SeededRng rng(21);
  const RegisterLayout layout(
      {Register{"A", 2}, Register{"B", 3}, Register{"C", 2}});
  const Matrix op = testutil::random_hermitian(3, rng);
  Vector v(12);
  for (Index i = 0; i < 12; ++i) {
    v(i) = rng.next_complex_gaussian();
  }
  const std::vector<std::string> labels = {"B"};
  const Vector direct = apply_to_registers(op, labels, layout, v);
  const Vector via_embed = embed_operator(op, labels, layout) * v;
  EXPECT_NEAR((direct - via_embed).norm(), 0.0, 1e-12);
}

TEST(ApplyToRegisters, NonAdjacentPair) {
  SeededRng rng(22);
  const RegisterLayout layout(
      {Register{"A", 2}, Register{"B", 2}, Register{"C", 2}});
  const Matrix op = testutil::random_hermitian(4, rng);
  Vector v(8);
  for (Index i = 0; i < 8; ++i) {
    v(i) = rng.next_complex_gaussian();
  }
  const std::vector<std::string> labels = {"A", "C"};
  const Vector direct = apply_to_registers(op, labels, layout, v);
  const Vector via_embed = embed_operator(op, labels, layout) * v;
  EXPECT_NEAR((direct - via_embed).norm(), 0.0, 1e-12);
}

TEST(Types, StateVectorValidation) {
  Vector unnormalized(2);
  unnormalized << 1.0, 1.0;
  EXPECT_THROW(StateVector(RegisterLayout::single("D", 2), unnormalized),
               DomainError);
  const StateVector fixed =
      StateVector::normalized(RegisterLayout::single("D", 2), unnormalized);
  EXPECT_NEAR(fixed.amplitudes().norm(), 1.0, 1e-12);
}

TEST(Types, HermitianValidation) {
  Matrix skew(2, 2);
  skew << 0.0, 1.0, -1.0, 0.0;
  EXPECT_THROW(HermitianOperator(RegisterLayout::single("D", 2), skew),
               DomainError);
}

TEST(Types, DensityTraceValidation) {
  Matrix half = Matrix::Identity(2, 2) * 0.25;
  EXPECT_THROW(DensityOperator(RegisterLayout::single("D", 2), half),
               DomainError);
}

}  // namespace
}  // namespace portprep
