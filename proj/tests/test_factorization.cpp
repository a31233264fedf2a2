#include "lqss/factorization.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using lqss::FactorizationMode;
using lqss::Index;
using lqss::Matrix;

Matrix diag2(double a, double b) {
  Matrix M = Matrix::Zero(2, 2);
  M(0, 0) = a;
  M(1, 1) = b;
  return M;
}

void expect_all_pass(const lqss::CheckReport& r) { EXPECT_TRUE(r.passed()) << r.to_string(); }

TEST(Factorization, IdentityTwoByTwo) {
  const Matrix F = Matrix::Identity(2, 2);
  const auto f = lqss::one_sided_symplectic_svd(F);
  EXPECT_EQ(f.E.k, 1);
  EXPECT_EQ(f.E.l, 0);
  ASSERT_EQ(f.E.xi_top.size(), 1u);
  EXPECT_NEAR(f.E.xi_top[0], 1.0, 1e-14);
  EXPECT_TRUE(f.E.materialize().isApprox(Matrix::Identity(2, 2), 1e-14));
  expect_all_pass(lqss::verify_factorization(F, f));
}

TEST(Factorization, IsotropicColumn) {
  const Matrix F = diag2(1, 0);  // F J F^T = 0
  const auto f = lqss::one_sided_symplectic_svd(F);
  EXPECT_EQ(f.E.k, 0);
  EXPECT_EQ(f.E.l, 1);
  EXPECT_EQ(f.E.materialize(), diag2(1, 0));
  expect_all_pass(lqss::verify_factorization(F, f));
}

TEST(Factorization, DiagonalSkewValue) {
  const Matrix F = diag2(2, 3);  // F J F^T = 6 J
  const auto f = lqss::one_sided_symplectic_svd(F);
  EXPECT_EQ(f.E.k, 1);
  EXPECT_EQ(f.E.l, 0);
  EXPECT_NEAR(f.E.xi_top[0], std::sqrt(6.0), 1e-13);
  EXPECT_NEAR(f.E.xi_mid[0], std::sqrt(6.0), 1e-13);
  expect_all_pass(lqss::verify_factorization(F, f));
}

TEST(Factorization, ZeroMatrix) {
  const Matrix F = Matrix::Zero(3, 4);
  const auto f = lqss::one_sided_symplectic_svd(F);
  EXPECT_EQ(f.E.k, 0);
  EXPECT_EQ(f.E.l, 0);
  expect_all_pass(lqss::verify_factorization(F, f));
}

TEST(Factorization, RandomPopulationStrictAndRelaxed) {
  for (int i = 0; i < 200; ++i) {
    const auto p = lqss::testing::planted_factor(i);
    for (auto mode : {FactorizationMode::strict, FactorizationMode::relaxed}) {
      const auto f = lqss::one_sided_symplectic_svd(p.F, {}, mode);
      EXPECT_EQ(f.E.k, p.k) << p.kind << " " << i;
      EXPECT_EQ(f.E.l, p.l) << p.kind << " " << i;
      const auto r = lqss::verify_factorization(p.F, f);
      EXPECT_TRUE(r.passed()) << p.kind << " " << i << "\n" << r.to_string();
    }
  }
}

TEST(Factorization, XiSquaredAreSkewValues) {
  for (int i = 1; i < 80; i += 4) {
    const auto p = lqss::testing::planted_factor(i);
    const auto f = lqss::one_sided_symplectic_svd(p.F);
    const Index r = p.F.cols() / 2;
    const Matrix M = p.F * lqss::testing::j_matrix(r) * p.F.transpose();
    // Oracle: the singular values of a skew matrix come in equal pairs mu, mu.
    Eigen::JacobiSVD<Matrix> svd(M);
    for (Index c = 0; c < f.E.k; ++c) {
      const double mu = svd.singularValues()(2 * c);
      EXPECT_NEAR(f.E.xi_top[c] * f.E.xi_top[c], mu, 1e-8 * mu) << i;
    }
  }
}

TEST(Factorization, CountsInvariantUnderTransforms) {
  for (int i = 0; i < 40; ++i) {
    const auto p = lqss::testing::planted_factor(i);
    const Index s = p.F.rows(), r = p.F.cols() / 2;
    Eigen::HouseholderQR<Matrix> qr(Matrix::Random(s, s));
    const Matrix Q = qr.householderQ();
    const Matrix S = lqss::random_symplectic(r, 300 + i, 0.3);
    const auto f = lqss::one_sided_symplectic_svd(Q * p.F * S);
    EXPECT_EQ(f.E.k, p.k) << i;
    EXPECT_EQ(f.E.l, p.l) << i;
  }
}

TEST(Factorization, CorruptedZFailsSymplecticity) {
  const auto p = lqss::testing::planted_factor(5);
  auto f = lqss::one_sided_symplectic_svd(p.F);
  f.Z(0, 0) += 0.1;
  const auto r = lqss::verify_factorization(p.F, f);
  EXPECT_FALSE(r.passed());
  const auto* c = r.find("z_symplectic");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->passed);
}

TEST(Factorization, CorruptedCountFailsOracle) {
  const Matrix F = Matrix::Identity(2, 2);
  auto f = lqss::one_sided_symplectic_svd(F);
  f.E = lqss::CanonicalE::strict(2, 1, {}, 1);
  const auto r = lqss::verify_factorization(F, f);
  ASSERT_NE(r.find("k_oracle"), nullptr);
  EXPECT_FALSE(r.find("k_oracle")->passed);
}

TEST(Factorization, RankAmbiguityCarriesSpectra) {
  // sigma = {1, 1.5e-3} both above tau = 1e-3, but the skew value 1.5e-3 is
  // below 2 tau sigma_max: k = 0 and l = 2 > r = 1.
  const Matrix F = diag2(1.0, 1.5e-3);
  try {
    lqss::one_sided_symplectic_svd(F, lqss::TolerancePolicy::fixed(1e-3));
    FAIL() << "expected RankAmbiguityError";
  } catch (const lqss::RankAmbiguityError& e) {
    ASSERT_EQ(e.singular_values().size(), 2u);
    EXPECT_NEAR(e.singular_values()[1], 1.5e-3, 1e-15);
    ASSERT_EQ(e.skew_values().size(), 1u);
    EXPECT_NEAR(e.skew_values()[0], 1.5e-3, 1e-15);
    EXPECT_DOUBLE_EQ(e.threshold(), 1e-3);
  }
}

TEST(Factorization, RelaxedKeepsStoredDiagonalsPositive) {
  for (int i = 0; i < 40; ++i) {
    const auto p = lqss::testing::planted_factor(i);
    const auto f = lqss::one_sided_symplectic_svd(p.F, {}, FactorizationMode::relaxed);
    for (double x : f.E.xi_top) EXPECT_GT(x, 0.0);
    for (double x : f.E.xi_mid) EXPECT_GT(x, 0.0);
    for (double x : f.E.ones_block) EXPECT_GT(x, 0.0);
    EXPECT_LT(f.q_condition, 1e8);
  }
}

TEST(CanonicalE, PatternAndKernel) {
  const auto E = lqss::CanonicalE::strict(6, 3, {2.0}, 1);
  const Matrix M = E.materialize();
  Matrix expected = Matrix::Zero(6, 6);
  expected(0, 0) = 2.0;
  expected(1, 1) = 1.0;
  expected(2, 3) = 2.0;
  EXPECT_EQ(M, expected);
  EXPECT_EQ(E.kernel_columns(), (std::vector<Index>{2, 4, 5}));
  for (Index c : E.kernel_columns()) EXPECT_EQ(M.col(c).norm(), 0.0);
}

TEST(CanonicalE, ValidateRejectsBadCounts) {
  lqss::CanonicalE E;
  E.s = 2;
  E.r = 1;
  E.k = 1;
  E.l = 1;
  E.xi_top = {1.0};
  E.xi_mid = {1.0};
  E.ones_block = {1.0};
  EXPECT_THROW(E.validate(), lqss::StructureError);
  EXPECT_THROW(lqss::CanonicalE::strict(4, 2, {-1.0}, 0).validate(), lqss::StructureError);
}

}  // namespace
