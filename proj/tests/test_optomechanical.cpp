#include "lqss/optomechanical.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using lqss::Index;
using lqss::Matrix;
using lqss::OptomechanicalParams;
using lqss::StateClass;
using lqss::SubspaceBasis;

const double kSqrt2 = std::sqrt(2.0);

// Coordinates: q1 q2 q3 p1 p2 p3.
Matrix columns(std::initializer_list<std::initializer_list<double>> cols) {
  Matrix M(6, static_cast<Index>(cols.size()));
  Index j = 0;
  for (const auto& c : cols) {
    Index i = 0;
    for (double v : c) M(i++, j) = v;
    ++j;
  }
  return M;
}

TEST(Optomechanical, CoefficientsAtUnitFrequency) {
  EXPECT_DOUBLE_EQ(lqss::coefficient_a(1.0), 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(lqss::coefficient_b(1.0), 1.0 / 6.0);
}

TEST(Optomechanical, CoefficientsAtOtherFrequency) {
  const double w = 2.0;
  double den = 0;
  for (int e = 0; e <= 10; e += 2) den += std::pow(w, e);
  EXPECT_NEAR(lqss::coefficient_a(w), w * (den - std::pow(w, 10)) / den, 1e-15);
  EXPECT_NEAR(lqss::coefficient_b(w), 1.0 / den, 1e-18);
}

TEST(Optomechanical, HamiltonianEntries) {
  const OptomechanicalParams p{1.3, 0.4, 0.9};
  const Matrix R = lqss::optomechanical_hamiltonian(p);
  Matrix expected = Matrix::Zero(6, 6);
  expected(2, 2) = expected(5, 5) = 1.3;
  expected(0, 2) = expected(2, 0) = expected(1, 2) = expected(2, 1) = 0.4;
  EXPECT_EQ(R, expected);
}

TEST(Optomechanical, CouplingOnlyTouchesOpticalMode) {
  const OptomechanicalParams p{1.0, 1.0, 0.8};
  const auto sys = lqss::optomechanical_system(p);
  // L = (gamma/sqrt2)(q3 + i p3) gives C = gamma [[e_q3], [e_p3]].
  Matrix C = Matrix::Zero(2, 6);
  C(0, 2) = 0.8;
  C(1, 5) = 0.8;
  EXPECT_LT((sys.C() - C).norm(), 1e-15);
  EXPECT_EQ(sys.Sigma(), Matrix::Identity(2, 2));
}

TEST(Optomechanical, InvalidParameters) {
  EXPECT_THROW(lqss::optomechanical_system({0.0, 1.0, 1.0}), lqss::ValidationError);
  EXPECT_THROW(lqss::optomechanical_system({1.0, -1.0, 1.0}), lqss::ValidationError);
  EXPECT_THROW(lqss::optomechanical_system({1.0, 1.0, std::nan("")}), lqss::ValidationError);
}

TEST(Optomechanical, ClassificationAndSubspaces) {
  const auto sys = lqss::optomechanical_system({});
  const auto dec = lqss::kalman_decompose(sys);
  EXPECT_EQ(dec.k, 1);
  EXPECT_EQ(dec.l, 1);
  EXPECT_EQ(dec.d, 1);

  const SubspaceBasis ctrl = SubspaceBasis::span_of(columns({{0, 0, 1, 0, 0, 0}, {0, 0, 0, 0, 0, 1}, {0, 0, 0, 1, 1, 0}}));
  const SubspaceBasis unobs = SubspaceBasis::span_of(columns({{1, -1, 0, 0, 0, 0}, {0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 1, 0}}));
  using lqss::KrylovVariant;
  EXPECT_LE(lqss::subspace_distance(lqss::controllable_subspace(sys, KrylovVariant::drift), ctrl), 1e-7);
  EXPECT_LE(lqss::subspace_distance(lqss::unobservable_subspace(sys, KrylovVariant::drift), unobs), 1e-7);

  // Rows of V^-1 ... the columns of V^# span the groups: (q^_a, p^_a, p^_b) is the controllable part.
  const Matrix Vi = dec.V_inverse();
  const auto c_idx = dec.indices({lqss::StateGroup::qa, lqss::StateGroup::pa, lqss::StateGroup::pb});
  EXPECT_LE(lqss::subspace_distance(SubspaceBasis::span_of(lqss::select(Vi, {0, 1, 2, 3, 4, 5}, c_idx)), ctrl),
            1e-7);
}

TEST(Optomechanical, ReferenceTransformIsAKalmanDecomposition) {
  for (const OptomechanicalParams p : {OptomechanicalParams{1, 1, 1}, OptomechanicalParams{0.7, 1.9, 0.4}}) {
    const auto sys = lqss::optomechanical_system(p);
    const Matrix V = lqss::optomechanical_reference_transform(p);
    EXPECT_TRUE(lqss::is_symplectic(V, 1e-12));
    const auto dec = lqss::adopt_transform(sys, V);
    EXPECT_TRUE(dec.residuals.passed()) << dec.residuals.to_string();
  }
}

TEST(Optomechanical, RefinedTransformIsOrthogonalWithSimpleEntries) {
  const OptomechanicalParams p{1, 1, 1};
  const auto sys = lqss::optomechanical_system(p);
  const auto ref = lqss::adopt_transform(sys, lqss::optomechanical_reference_transform(p));
  const auto out = lqss::refine(sys, ref, lqss::optomechanical_reference_refinement(p));
  const Matrix& V = out.V;
  EXPECT_LT(lqss::orthogonality_residual(V), 1e-12);
  EXPECT_TRUE(lqss::is_symplectic(V, 1e-12));
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 6; ++j) {
      const double a = std::abs(V(i, j));
      const bool simple = a < 1e-12 || std::abs(a - 1) < 1e-12 || std::abs(a - 1 / kSqrt2) < 1e-12;
      EXPECT_TRUE(simple) << "V'(" << i << "," << j << ") = " << V(i, j);
    }
  }

  const auto states = lqss::classify_states(out);
  // q^_b = (q1 + q2)/sqrt2, up to sign.
  EXPECT_EQ(states[1].label, StateClass::cbar_o);
  const double sign = states[1].row(0) > 0 ? 1.0 : -1.0;
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(6);
  expected(0) = expected(1) = 1 / kSqrt2;
  EXPECT_LT((sign * states[1].row - expected).norm(), 1e-12);

  // dp^_b depends on q^_a with coefficient -sqrt2 lambda; q^_a is driven by p^_a with omega.
  EXPECT_NEAR(out.A_hat(4, 0), -kSqrt2 * p.lambda, 1e-12);
  EXPECT_NEAR(out.A_hat(0, 3), p.omega, 1e-12);
  EXPECT_TRUE(out.residuals.passed()) << out.residuals.to_string();
}

TEST(Optomechanical, RefinementAcrossParameters) {
  for (const OptomechanicalParams p : {OptomechanicalParams{0.5, 2.0, 1.5}, OptomechanicalParams{3.0, 0.2, 0.6}}) {
    const auto sys = lqss::optomechanical_system(p);
    const auto ref = lqss::adopt_transform(sys, lqss::optomechanical_reference_transform(p));
    const auto out = lqss::refine(sys, ref, lqss::optomechanical_reference_refinement(p));
    EXPECT_LT(lqss::orthogonality_residual(out.V), 1e-10);
    EXPECT_NEAR(out.A_hat(4, 0), -kSqrt2 * p.lambda, 1e-10);
  }
}

}  // namespace
