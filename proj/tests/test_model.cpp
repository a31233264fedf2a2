#include "lqss/model.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using lqss::ComplexMatrix;
using lqss::Index;
using lqss::Matrix;
using lqss::QuadratureSystem;

const double kSqrt2 = std::sqrt(2.0);

Matrix mat2(double a, double b, double c, double d) {
  Matrix M(2, 2);
  M << a, b, c, d;
  return M;
}

TEST(Build, PositionCouplingHasZeroDrift) {
  // Oracle: multiply C^# = -J C^T J against C directly.
  const Matrix C = mat2(kSqrt2, 0, 0, 0);
  const auto sys = QuadratureSystem::build(Matrix::Zero(2, 2), C, Matrix::Identity(2, 2));
  const Matrix J = lqss::testing::j_matrix(1);
  const Matrix Csharp = -J * C.transpose() * J;
  EXPECT_LT((sys.A() + 0.5 * Csharp * C).norm(), 1e-15);
  EXPECT_EQ((Csharp * C).norm(), 0.0);
  EXPECT_LT(sys.A().norm(), 1e-15);
  EXPECT_LT((sys.B() - mat2(0, 0, 0, -kSqrt2)).norm(), 1e-15);
  EXPECT_EQ(sys.D(), Matrix::Identity(2, 2));
}

TEST(Build, IdentityCoupling) {
  const auto sys = QuadratureSystem::build(Matrix::Zero(2, 2), Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  EXPECT_LT((sys.A() + 0.5 * Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LT((sys.B() + Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(Build, NoCouplingLeavesHamiltonianDrift) {
  Matrix R(4, 4);
  R << 2, 1, 0, 0, 1, 3, 0, 1, 0, 0, 1, 0, 0, 1, 0, 4;
  const auto sys = QuadratureSystem::build(R, Matrix::Zero(2, 4), Matrix::Identity(2, 2));
  EXPECT_TRUE(sys.A().isApprox(lqss::testing::j_matrix(2) * R));
  EXPECT_EQ(sys.B().norm(), 0.0);
}

TEST(Build, ValidationNamesInvariant) {
  Matrix R = Matrix::Zero(2, 2);
  R(0, 1) = 1.0;
  try {
    QuadratureSystem::build(R, Matrix::Zero(2, 2), Matrix::Identity(2, 2));
    FAIL();
  } catch (const lqss::ValidationError& e) {
    EXPECT_EQ(e.invariant(), "R symmetric");
    EXPECT_NEAR(e.residual(), std::sqrt(2.0), 1e-12);
  }
  try {
    QuadratureSystem::build(Matrix::Zero(2, 2), Matrix::Zero(2, 2), 2.0 * Matrix::Identity(2, 2));
    FAIL();
  } catch (const lqss::ValidationError& e) {
    EXPECT_EQ(e.invariant(), "Sigma symplectic");
  }
}

TEST(Build, ShapeErrors) {
  EXPECT_THROW(QuadratureSystem::build(Matrix::Zero(3, 3), Matrix::Zero(2, 3), Matrix::Identity(2, 2)),
               lqss::InputError);
  EXPECT_THROW(QuadratureSystem::build(Matrix::Zero(2, 2), Matrix::Zero(2, 4), Matrix::Identity(2, 2)),
               lqss::DimensionError);
  EXPECT_THROW(QuadratureSystem::build(Matrix::Zero(2, 2), Matrix::Zero(4, 2), Matrix::Identity(2, 2)),
               lqss::DimensionError);
}

TEST(Transform, TransferFunctionIsInvariant) {
  const auto sys = lqss::random_system(3, 2, 11);
  const Matrix T = lqss::random_symplectic(3, 12, 0.3);
  const auto sys2 = sys.transformed(T);
  for (double w : {0.3, 1.7}) {
    const ComplexMatrix g1 = lqss::transfer_matrix(sys.A(), sys.B(), sys.C(), sys.D(), {0.0, w});
    const ComplexMatrix g2 = lqss::transfer_matrix(sys2.A(), sys2.B(), sys2.C(), sys2.D(), {0.0, w});
    EXPECT_LT((g1 - g2).norm(), 1e-10 * g1.norm());
  }
}

TEST(Physical, IdentityScattering) {
  lqss::PhysicalSpec spec{ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(2, 1), ComplexMatrix::Zero(2, 1)};
  EXPECT_TRUE(lqss::from_physical(spec).Sigma.isApprox(Matrix::Identity(4, 4)));
}

TEST(Physical, PositionCoupling) {
  lqss::PhysicalSpec spec{ComplexMatrix::Identity(1, 1), ComplexMatrix::Ones(1, 1), ComplexMatrix::Zero(1, 1)};
  EXPECT_LT((lqss::from_physical(spec).C - mat2(kSqrt2, 0, 0, 0)).norm(), 1e-15);
}

TEST(Physical, AnnihilationCoupling) {
  lqss::PhysicalSpec spec{ComplexMatrix::Identity(1, 1), ComplexMatrix::Constant(1, 1, 1 / kSqrt2),
                          ComplexMatrix::Constant(1, 1, {0.0, 1 / kSqrt2})};
  EXPECT_LT((lqss::from_physical(spec).C - Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(Physical, PhaseScatteringIsOrthogonalSymplectic) {
  const double th = 0.7;
  lqss::PhysicalSpec spec{ComplexMatrix::Constant(1, 1, std::polar(1.0, th)), ComplexMatrix::Zero(1, 1),
                          ComplexMatrix::Zero(1, 1)};
  const Matrix S = lqss::from_physical(spec).Sigma;
  EXPECT_TRUE(lqss::is_symplectic(S, 1e-14));
  EXPECT_LT(lqss::orthogonality_residual(S), 1e-14);
  EXPECT_NEAR(S(0, 0), std::cos(th), 1e-15);
}

TEST(Physical, NonUnitaryRejected) {
  lqss::PhysicalSpec spec{ComplexMatrix::Constant(1, 1, 2.0), ComplexMatrix::Zero(1, 1), ComplexMatrix::Zero(1, 1)};
  EXPECT_THROW(lqss::from_physical(spec), lqss::ValidationError);
}

TEST(Krylov, NoCouplingGivesZero) {
  const auto sys = QuadratureSystem::build(Matrix::Identity(4, 4), Matrix::Zero(2, 4), Matrix::Identity(2, 2));
  for (auto v : {lqss::KrylovVariant::drift, lqss::KrylovVariant::hamiltonian}) {
    const auto k = lqss::krylov_matrices(sys, v);
    EXPECT_EQ(k.controllability.norm(), 0.0);
    EXPECT_EQ(k.observability.norm(), 0.0);
    EXPECT_EQ(k.depth, 4);
  }
}

TEST(Krylov, MatchesExplicitPowers) {
  const auto sys = lqss::random_system(3, 2, 21);
  const auto k = lqss::krylov_matrices(sys, lqss::KrylovVariant::hamiltonian);
  const Matrix oracle = lqss::testing::observability_by_powers(sys);
  EXPECT_LT((k.observability - oracle).norm(), 1e-12 * oracle.norm());
}

TEST(Krylov, SubspacesAgreeAcrossVariants) {
  for (int i = 0; i < 30; ++i) {
    const auto mem = lqss::testing::population_member(i);
    using lqss::KrylovVariant;
    const auto cd = lqss::controllable_subspace(mem.system, KrylovVariant::drift);
    const auto ch = lqss::controllable_subspace(mem.system, KrylovVariant::hamiltonian);
    const auto ud = lqss::unobservable_subspace(mem.system, KrylovVariant::drift);
    const auto uh = lqss::unobservable_subspace(mem.system, KrylovVariant::hamiltonian);
    EXPECT_LE(lqss::subspace_distance(cd, ch), 1e-7) << i;
    EXPECT_LE(lqss::subspace_distance(ud, uh), 1e-7) << i;
  }
}

TEST(T0, SingleModeIdentityScattering) {
  const Matrix T0 = lqss::t0_matrix(1, 1, Matrix::Identity(2, 2));
  const Matrix J2 = lqss::testing::j_matrix(1);
  Matrix blocks = Matrix::Zero(4, 4);
  blocks.topLeftCorner(2, 2) = J2;
  blocks.bottomRightCorner(2, 2) = -J2;
  EXPECT_TRUE(T0.isApprox(blocks * lqss::testing::j_matrix(2)));

  const auto sys = QuadratureSystem::build(Matrix::Zero(2, 2), mat2(kSqrt2, 0, 0, 0), Matrix::Identity(2, 2));
  const auto k = lqss::krylov_matrices(sys, lqss::KrylovVariant::hamiltonian);
  EXPECT_LT((k.observability - T0 * lqss::sharp_adjoint(k.controllability)).norm(), 1e-14);
}

TEST(T0, StandardFormNeedsOrthogonalScatteringAndEvenModes) {
  // J_4nm pairs block b with block b + n; diag(D, D) keeps that pairing only
  // for orthogonal D, and the +-J signs of the two blocks agree only for even n.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix D = lqss::random_orthogonal_symplectic(2, seed);
    EXPECT_TRUE(lqss::is_symplectic(lqss::t0_matrix(2, 2, D), 1e-10));
    EXPECT_TRUE(lqss::is_symplectic(lqss::t0_matrix(4, 2, D), 1e-10));
    EXPECT_FALSE(lqss::is_symplectic(lqss::t0_matrix(3, 2, D), 1e-10));
    EXPECT_FALSE(lqss::is_symplectic(lqss::t0_matrix(2, 2, lqss::random_symplectic(2, seed)), 1e-10));
  }
}

TEST(T0, PreservesBlockForm) {
  for (Index n : {1, 2, 3}) {
    const Index m = 2, N = 4 * n * m;
    Matrix Jb = Matrix::Zero(N, N);
    for (Index b = 0; b < 2 * n; ++b) Jb.block(b * 2 * m, b * 2 * m, 2 * m, 2 * m) = lqss::testing::j_matrix(m);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Matrix T0 = lqss::t0_matrix(n, m, lqss::random_symplectic(m, seed));
      EXPECT_LT((T0 * Jb * T0.transpose() - Jb).norm(), 1e-10);
    }
  }
}

TEST(T0, RelatesKrylovMatrices) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sys = lqss::random_system(1 + seed % 4, 1 + seed % 3, seed);
    const auto k = lqss::krylov_matrices(sys, lqss::KrylovVariant::hamiltonian);
    const Matrix T0 = lqss::t0_matrix(sys.modes(), sys.fields(), sys.Sigma());
    EXPECT_LT((k.observability - T0 * lqss::sharp_adjoint(k.controllability)).norm(),
              1e-10 * k.observability.norm());
  }
}

TEST(T0, RejectsNonSymplectic) {
  EXPECT_THROW(lqss::t0_matrix(1, 1, 2.0 * Matrix::Identity(2, 2)), lqss::ValidationError);
}

TEST(Random, DeterministicPerSeed) {
  const auto a = lqss::random_system(4, 2, 99);
  const auto b = lqss::random_system(4, 2, 99);
  const auto c = lqss::random_system(4, 2, 100);
  EXPECT_EQ(a.R(), b.R());
  EXPECT_EQ(a.C(), b.C());
  EXPECT_EQ(a.Sigma(), b.Sigma());
  EXPECT_NE(a.R(), c.R());
}

TEST(Random, ScatteringIsSymplectic) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_TRUE(lqss::is_symplectic(lqss::random_system(2, 3, seed).Sigma(), 1e-10));
    EXPECT_TRUE(lqss::is_symplectic(lqss::random_orthogonal_symplectic(3, seed), 1e-12));
    EXPECT_LT(lqss::orthogonality_residual(lqss::random_orthogonal_symplectic(3, seed)), 1e-12);
  }
}

TEST(Random, PlantedStructureHasPlantedRanks) {
  lqss::RandomSystemOptions opts;
  opts.planted = lqss::PlantedStructure{1, 2, 1};
  const auto sys = lqss::random_system(4, 2, 5, opts);
  const Matrix O = lqss::testing::observability_by_powers(sys);
  // dim Ker O = l + 2d; with these sizes rank = 2k + l.
  EXPECT_EQ(lqss::testing::svd_rank(O, 1e-8 * O.norm()), 2 * 1 + 2);
}

}  // namespace
