#pragma once

// Shared generators and independent oracles for the test programs. The oracles
// use plain Eigen SVDs so they do not share code paths with the library's rank
// decisions.

#include "lqss/kalman.hpp"
#include "lqss/model.hpp"

#include <Eigen/SVD>

#include <optional>
#include <random>

namespace lqss::testing {

struct PopulationMember {
  QuadratureSystem system;
  Index n = 0;
  Index m = 0;
  std::optional<PlantedStructure> planted;
};

/// Member i of the seeded population (n <= 5, m <= 3). Odd members carry a
/// planted Kalman structure, even ones are generic.
inline PopulationMember population_member(int i) {
  const Index n = 1 + i % 5;
  const Index m = 1 + (i / 5) % 3;
  RandomSystemOptions opts;
  std::optional<PlantedStructure> planted;
  if (i % 2 == 1) {
    std::mt19937_64 rng(9000 + static_cast<std::uint64_t>(i));
    std::uniform_int_distribution<Index> pick_k(0, n);
    const Index k = pick_k(rng);
    std::uniform_int_distribution<Index> pick_l(0, n - k);
    const Index l = pick_l(rng);
    planted = PlantedStructure{k, l, n - k - l};
    opts.planted = planted;
  }
  if (i % 7 == 3) opts.scattering = RandomSystemOptions::Scattering::identity;
  return {random_system(n, m, 1000 + static_cast<std::uint64_t>(i), opts), n, m, planted};
}

/// Counts singular values above tau.
inline Index svd_rank(const Matrix& M, double tau) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  Index r = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > tau) ++r;
  }
  return r;
}

inline Matrix j_matrix(Index k) {
  Matrix J = Matrix::Zero(2 * k, 2 * k);
  J.topRightCorner(k, k).setIdentity();
  J.bottomLeftCorner(k, k) = -Matrix::Identity(k, k);
  return J;
}

/// C times powers of J R, stacked, computed with explicit matrix powers.
inline Matrix observability_by_powers(const QuadratureSystem& sys) {
  const Index n = sys.modes();
  const Matrix G = j_matrix(n) * sys.R();
  Matrix out(2 * n * sys.C().rows(), 2 * n);
  Matrix P = Matrix::Identity(2 * n, 2 * n);
  for (Index j = 0; j < 2 * n; ++j) {
    out.middleRows(j * sys.C().rows(), sys.C().rows()) = sys.C() * P;
    P = (P * G).eval();
  }
  return out;
}

/// Largest principal angle via the sines of the residual of projecting one
/// orthonormal basis onto the other.
inline double largest_angle(const Matrix& a, const Matrix& b) {
  auto orth = [](const Matrix& X) -> Matrix {
    if (X.cols() == 0) return X;
    Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinU);
    Index r = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) > 1e-10 * svd.singularValues()(0)) ++r;
    }
    return svd.matrixU().leftCols(r);
  };
  const Matrix A = orth(a), B = orth(b);
  if (A.cols() != B.cols()) return 2.0;
  if (A.cols() == 0) return 0.0;
  const Matrix residual = A - B * (B.transpose() * A);
  Eigen::JacobiSVD<Matrix> svd(residual);
  return std::asin(std::min(1.0, svd.singularValues()(0)));
}


struct PlantedFactor {
  Matrix F;
  Index k = 0;
  Index l = 0;
  const char* kind = "";
};

/// Random s x 2r matrices (s <= 24, r <= 6) with known (k, l): dense Gaussian,
/// Q E Z^-1 with planted counts, and the forced k = 0 and l = 0 families.
inline PlantedFactor planted_factor(int i) {
  std::mt19937_64 rng(5000 + static_cast<std::uint64_t>(i));
  std::uniform_int_distribution<Index> pick_r(1, 6), pick_s(1, 24);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index r = pick_r(rng);
  const Index s = pick_s(rng);
  PlantedFactor out;

  if (i % 4 == 0) {
    out.kind = "dense";
    out.F.resize(s, 2 * r);
    for (Index a = 0; a < s; ++a)
      for (Index b = 0; b < 2 * r; ++b) out.F(a, b) = normal(rng);
    // Generic skew forms have full even rank.
    if (s <= 2 * r) {
      out.k = s / 2;
      out.l = s - 2 * out.k;
    } else {
      out.k = r;
      out.l = 0;
    }
    return out;
  }

  Index k = 0, l = 0;
  auto draw = [&](Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, std::max(lo, hi))(rng); };
  if (i % 4 == 1) {
    out.kind = "planted";
    k = draw(0, std::min(r, s / 2));
    l = draw(0, std::min(r - k, s - 2 * k));
  } else if (i % 4 == 2) {
    out.kind = "k=0";
    l = draw(0, std::min(r, s));
  } else {
    out.kind = "l=0";
    k = draw(0, std::min(r, s / 2));
  }
  Matrix E = Matrix::Zero(s, 2 * r);
  std::uniform_real_distribution<double> pick_xi(0.5, 3.0);
  for (Index c = 0; c < k; ++c) {
    const double xi = pick_xi(rng);
    E(c, c) = xi;
    E(k + l + c, r + c) = xi;
  }
  for (Index c = 0; c < l; ++c) E(k + c, k + c) = 1.0;
  Matrix G(s, s);
  for (Index a = 0; a < s; ++a)
    for (Index b = 0; b < s; ++b) G(a, b) = normal(rng);
  const Matrix Q0 = G.householderQr().householderQ();
  const Matrix Z0 = random_symplectic(r, 7000 + static_cast<std::uint64_t>(i), 0.3);
  // Z0^-1 = -J Z0^T J.
  const Matrix J = j_matrix(r);
  out.F = Q0 * E * (-J * Z0.transpose() * J);
  out.k = k;
  out.l = l;
  return out;
}

}  // namespace lqss::testing
