#include "lqss/model.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace lqss {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string shape(const Matrix& M) {
  return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

Matrix symmetric_gaussian(Index n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix X(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) X(i, j) = normal(rng);
  return scale * 0.5 * (X + X.transpose());
}

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix X(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) X(i, j) = normal(rng);
  return X;
}

Matrix exp_hamiltonian(const Matrix& K) {
  const Matrix H = jmat(K.rows() / 2) * K;
  return H.exp();
}

Matrix orthogonal_symplectic(Index k, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix Zc(k, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < k; ++i) Zc(i, j) = {normal(rng), normal(rng)};
  const ComplexMatrix U = Zc.householderQr().householderQ();
  Matrix out(2 * k, 2 * k);
  out << U.real(), U.imag(), -U.imag(), U.real();
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// QuadratureSystem

QuadratureSystem::QuadratureSystem(Matrix R, Matrix C, Matrix Sigma)
    : n_(R.rows() / 2), m_(C.rows() / 2), R_(std::move(R)), C_(std::move(C)), Sigma_(std::move(Sigma)) {}

QuadratureSystem QuadratureSystem::build(Matrix R, Matrix C, Matrix Sigma) {
  if (R.rows() != R.cols() || R.rows() == 0 || R.rows() % 2 != 0) {
    throw DimensionError("R must be 2n x 2n with n >= 1, got " + shape(R));
  }
  if (C.rows() == 0 || C.rows() % 2 != 0 || C.cols() != R.rows()) {
    throw DimensionError("C must be 2m x " + std::to_string(R.rows()) + " with m >= 1, got " +
                         shape(C));
  }
  if (Sigma.rows() != C.rows() || Sigma.cols() != C.rows()) {
    throw DimensionError("Sigma must be " + std::to_string(C.rows()) + "x" +
                         std::to_string(C.rows()) + ", got " + shape(Sigma));
  }
  require_finite(R, "R");
  require_finite(C, "C");
  require_finite(Sigma, "Sigma");

  const double asym = (R - R.transpose()).norm();
  if (asym > 1e-10 * std::max(R.norm(), kTinyNorm)) {
    throw ValidationError("R symmetric", asym,
                          "R is not symmetric: ||R - R^T||_F = " + std::to_string(asym));
  }
  const auto sym = is_symplectic(Sigma, 1e-10);
  if (!sym) {
    throw ValidationError("Sigma symplectic", sym.residual,
                          "Sigma is not symplectic: ||Sigma Sigma^# - I||_F = " +
                              std::to_string(sym.residual));
  }
  Matrix Rs = 0.5 * (R + R.transpose());
  return QuadratureSystem(std::move(Rs), std::move(C), std::move(Sigma));
}

Matrix QuadratureSystem::JR() const { return jmat(n_) * R_; }

Matrix QuadratureSystem::A() const { return JR() - 0.5 * sharp_adjoint(C_) * C_; }

Matrix QuadratureSystem::B() const { return -sharp_adjoint(C_) * Sigma_; }

QuadratureSystem QuadratureSystem::transformed(const Matrix& T) const {
  if (T.rows() != 2 * n_ || T.cols() != 2 * n_) {
    throw DimensionError("transformation must be " + std::to_string(2 * n_) + " square, got " +
                         shape(T));
  }
  const auto sym = is_symplectic(T, 1e-9);
  if (!sym) {
    throw ValidationError("T symplectic", sym.residual,
                          "state transformation is not symplectic: residual " +
                              std::to_string(sym.residual));
  }
  const Matrix Tinv = sharp_adjoint(T);
  Matrix Rn = Tinv.transpose() * R_ * Tinv;
  Rn = 0.5 * (Rn + Rn.transpose()).eval();
  return QuadratureSystem(std::move(Rn), C_ * Tinv, Sigma_);
}

ComplexMatrix transfer_matrix(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D,
                              std::complex<double> s) {
  const Index n = A.rows();
  ComplexMatrix pencil = s * ComplexMatrix::Identity(n, n) - A.cast<std::complex<double>>();
  const ComplexMatrix X = pencil.partialPivLu().solve(B.cast<std::complex<double>>());
  return C.cast<std::complex<double>>() * X + D.cast<std::complex<double>>();
}

// ---------------------------------------------------------------------------
// Physical data

void PhysicalSpec::validate() const {
  const Index m = S.rows();
  if (m == 0 || S.cols() != m) throw DimensionError("S must be square and nonempty");
  if (Lq.rows() != m || Lp.rows() != m || Lq.cols() != Lp.cols() || Lq.cols() == 0) {
    throw DimensionError("Lq and Lp must both be m x n with m = " + std::to_string(m));
  }
  if (!S.allFinite() || !Lq.allFinite() || !Lp.allFinite()) {
    throw ValidationError("finite", std::numeric_limits<double>::infinity(),
                          "physical data contains NaN or infinite entries");
  }
  const double res = (S.adjoint() * S - ComplexMatrix::Identity(m, m)).norm();
  if (res > 1e-10) {
    throw ValidationError("S unitary", res,
                          "scattering matrix is not unitary: ||S^H S - I||_F = " + std::to_string(res));
  }
}

CouplingData from_physical(const PhysicalSpec& spec) {
  spec.validate();
  const std::complex<double> i(0.0, 1.0);
  const Index m = spec.S.rows();
  const Index n = spec.Lq.cols();

  const ComplexMatrix Lqc = spec.Lq.conjugate();
  const ComplexMatrix Lpc = spec.Lp.conjugate();
  ComplexMatrix Cc(2 * m, 2 * n);
  Cc << spec.Lq + Lqc, spec.Lp + Lpc, -i * (spec.Lq - Lqc), -i * (spec.Lp - Lpc);
  Cc /= std::sqrt(2.0);

  const ComplexMatrix Sc = spec.S.conjugate();
  ComplexMatrix Sg(2 * m, 2 * m);
  Sg << spec.S + Sc, i * (spec.S - Sc), -i * (spec.S - Sc), spec.S + Sc;
  Sg *= 0.5;

  const double imag = std::max(Cc.imag().cwiseAbs().maxCoeff(), Sg.imag().cwiseAbs().maxCoeff());
  if (imag > 1e-12 * std::max(1.0, std::max(Cc.norm(), Sg.norm()))) {
    throw ValidationError("real coupling", imag, "coupling data did not produce real matrices");
  }
  return {Cc.real(), Sg.real()};
}

// ---------------------------------------------------------------------------
// Krylov matrices

KrylovMatrices krylov_matrices(const QuadratureSystem& sys, KrylovVariant variant,
                               const KrylovOptions& options) {
  const Index n = sys.modes();
  const Index m = sys.fields();
  const Matrix G = variant == KrylovVariant::drift ? sys.A() : sys.JR();
  const Matrix B = sys.B();
  const Matrix& C = sys.C();
  const Index full_depth = 2 * n;

  KrylovMatrices out;
  out.variant = variant;
  out.controllability.resize(2 * n, full_depth * 2 * m);
  out.observability.resize(full_depth * 2 * m, 2 * n);

  Matrix right = B;  // G^j B
  Matrix left = C;   // C G^j
  Index depth = 0;
  Index last_rank = -1;
  for (Index j = 0; j < full_depth; ++j) {
    out.controllability.middleCols(j * 2 * m, 2 * m) = right;
    out.observability.middleRows(j * 2 * m, 2 * m) = left;
    depth = j + 1;
    if (options.early_stop) {
      const Index rc = numerical_rank(out.controllability.leftCols(depth * 2 * m), options.tolerance).rank;
      const Index ro = numerical_rank(out.observability.topRows(depth * 2 * m), options.tolerance).rank;
      const Index combined = rc + ro;
      if (combined == last_rank) break;
      last_rank = combined;
    }
    if (j + 1 < full_depth) {
      right = (G * right).eval();
      left = (left * G).eval();
    }
  }
  out.depth = depth;
  out.controllability.conservativeResize(Eigen::NoChange, depth * 2 * m);
  out.observability.conservativeResize(depth * 2 * m, Eigen::NoChange);
  return out;
}

namespace {

double power_sum_bound(Index n, double lead, double gnorm) {
  double sum = 0.0;
  double power = 1.0;
  for (Index j = 0; j < 2 * n; ++j) {
    const double term = static_cast<double>((j + 1) * 2 * n) * lead * power;
    sum += term * term;
    power *= gnorm;
  }
  return kEps * std::sqrt(sum);
}

}  // namespace

KrylovErrorBounds krylov_error_bounds(const QuadratureSystem& sys, KrylovVariant variant) {
  const Index n = sys.modes();
  const Matrix G = variant == KrylovVariant::drift ? sys.A() : sys.JR();
  const double gnorm = G.operatorNorm();
  return {power_sum_bound(n, sys.B().operatorNorm(), gnorm), power_sum_bound(n, sys.C().operatorNorm(), gnorm)};
}

SubspaceBasis controllable_subspace(const QuadratureSystem& sys, KrylovVariant variant,
                                    const TolerancePolicy& policy) {
  TolerancePolicy p = policy;
  p.floor = std::max(p.floor, krylov_error_bounds(sys, variant).controllability);
  return numerical_rank(krylov_matrices(sys, variant).controllability, p).image;
}

SubspaceBasis unobservable_subspace(const QuadratureSystem& sys, KrylovVariant variant,
                                    const TolerancePolicy& policy) {
  TolerancePolicy p = policy;
  p.floor = std::max(p.floor, krylov_error_bounds(sys, variant).observability);
  return numerical_rank(krylov_matrices(sys, variant).observability, p).kernel;
}

Matrix t0_matrix(Index n, Index m, const Matrix& D) {
  if (n <= 0 || m <= 0) throw DimensionError("t0_matrix: n and m must be positive");
  if (D.rows() != 2 * m || D.cols() != 2 * m) {
    throw DimensionError("t0_matrix: D must be " + std::to_string(2 * m) + " square, got " + shape(D));
  }
  const auto sym = is_symplectic(D, 1e-10);
  if (!sym) {
    throw ValidationError("D symplectic", sym.residual,
                          "t0_matrix: D is not symplectic, residual " + std::to_string(sym.residual));
  }
  const Index blocks = 2 * n;
  const Index size = blocks * 2 * m;
  const Matrix Jm = jmat(m);
  Matrix left = Matrix::Zero(size, size);
  for (Index b = 0; b < blocks; ++b) {
    const double sign = b % 2 == 0 ? 1.0 : -1.0;
    left.block(b * 2 * m, b * 2 * m, 2 * m, 2 * m) = sign * D * Jm;
  }
  return left * jmat(size / 2);
}

// ---------------------------------------------------------------------------
// Random systems

Matrix random_symplectic(Index k, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  return exp_hamiltonian(symmetric_gaussian(2 * k, rng, scale));
}

Matrix random_orthogonal_symplectic(Index k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return orthogonal_symplectic(k, rng);
}

QuadratureSystem random_system(Index n, Index m, std::uint64_t seed, const RandomSystemOptions& options) {
  if (n < 1 || m < 1) throw DimensionError("random_system: n and m must be at least 1");
  std::mt19937_64 rng(seed);

  Matrix R = symmetric_gaussian(2 * n, rng, 1.0);
  Matrix C = gaussian(2 * m, 2 * n, rng, 1.0 / std::sqrt(2.0 * static_cast<double>(m)));
  Matrix Sigma = Matrix::Identity(2 * m, 2 * m);
  if (options.scattering == RandomSystemOptions::Scattering::exponential) {
    Sigma = exp_hamiltonian(symmetric_gaussian(2 * m, rng, 0.5));
  }

  if (!options.planted) return QuadratureSystem::build(std::move(R), std::move(C), std::move(Sigma));

  const auto [k, l, d] = *options.planted;
  if (k < 0 || l < 0 || d < 0 || k + l + d != n) {
    throw DimensionError("random_system: planted group sizes must be nonnegative and sum to n");
  }
  // Index sets in planted coordinates.
  std::vector<Index> qa, qb, qc, pa, pb, pc;
  for (Index i = 0; i < n; ++i) {
    auto& q = i < k ? qa : (i < k + l ? qb : qc);
    auto& p = i < k ? pa : (i < k + l ? pb : pc);
    q.push_back(i);
    p.push_back(n + i);
  }
  auto join = [](std::vector<Index> a, const std::vector<Index>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  auto clear = [&R](const std::vector<Index>& rows, const std::vector<Index>& cols) {
    for (Index i : rows)
      for (Index j : cols) R(i, j) = R(j, i) = 0.0;
  };
  // span{q_c, p_b, p_c} must be J R invariant and annihilated by C.
  clear(join(pa, pb), qc);
  clear(join(pa, pb), join(pb, pc));
  clear(qa, qc);
  clear(qa, join(pb, pc));
  for (Index j : join(qc, join(pb, pc))) C.col(j).setZero();

  const Matrix T = orthogonal_symplectic(n, rng) *
                   exp_hamiltonian(symmetric_gaussian(2 * n, rng, options.shear)) *
                   orthogonal_symplectic(n, rng);
  return QuadratureSystem::build(std::move(R), std::move(C), std::move(Sigma)).transformed(T);
}

}  // namespace lqss
