#pragma once

// Linear quantum stochastic systems in the real quadrature representation:
//
//   dx = A x dt + B dU,   dY = C x dt + D dU,
//   A = J R - 1/2 C^# C,  B = -C^# Sigma,  D = Sigma,
//
// with state x = (q_1..q_n, p_1..p_n) and 2m field quadratures.

#include "lqss/linalg.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <optional>

namespace lqss {

/// An LQSS given by its Hamiltonian matrix R (2n x 2n, symmetric), coupling
/// matrix C (2m x 2n) and symplectic scattering Sigma (2m x 2m). A, B and D are
/// derived on demand.
class QuadratureSystem {
 public:
  /// Validates shapes, symmetry of R (1e-10 relative) and symplecticity of Sigma
  /// (1e-10). Throws DimensionError or ValidationError.
  static QuadratureSystem build(Matrix R, Matrix C, Matrix Sigma);

  Index modes() const noexcept { return n_; }
  Index fields() const noexcept { return m_; }

  const Matrix& R() const noexcept { return R_; }
  const Matrix& C() const noexcept { return C_; }
  const Matrix& Sigma() const noexcept { return Sigma_; }

  Matrix A() const;
  Matrix B() const;
  const Matrix& D() const noexcept { return Sigma_; }
  /// J R, the Hamiltonian part of the drift.
  Matrix JR() const;

  /// System seen in coordinates x' = T x (T symplectic): R' = T^-T R T^-1, C' = C T^-1.
  QuadratureSystem transformed(const Matrix& T) const;

 private:
  QuadratureSystem(Matrix R, Matrix C, Matrix Sigma);

  Index n_ = 0;
  Index m_ = 0;
  Matrix R_;
  Matrix C_;
  Matrix Sigma_;
};

/// C (sI - A)^-1 B + D evaluated at a complex frequency.
ComplexMatrix transfer_matrix(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D,
                              std::complex<double> s);

/// Physical data: scattering S (m x m, unitary) and the coupling operator
/// L = Lq q + Lp p with complex m x n coefficient matrices.
struct PhysicalSpec {
  ComplexMatrix S;
  ComplexMatrix Lq;
  ComplexMatrix Lp;

  /// Throws DimensionError / ValidationError (S^H S = I within 1e-10).
  void validate() const;
};

struct CouplingData {
  Matrix C;
  Matrix Sigma;
};

/// Real coupling and scattering matrices built from complex physical data.
/// C = 1/sqrt(2) [[Lq + Lq*, Lp + Lp*], [-i(Lq - Lq*), -i(Lp - Lp*)]],
/// Sigma = 1/2 [[S + S*, i(S - S*)], [-i(S - S*), S + S*]] (* = entrywise conjugate).
CouplingData from_physical(const PhysicalSpec& spec);

enum class KrylovVariant {
  drift,        ///< powers of A
  hamiltonian,  ///< powers of J R
};

struct KrylovMatrices {
  Matrix controllability;  ///< [B, G B, ..., G^{depth-1} B]
  Matrix observability;    ///< [C; C G; ...; C G^{depth-1}]
  KrylovVariant variant = KrylovVariant::hamiltonian;
  Index depth = 0;
};

struct KrylovOptions {
  /// Stop once one extra power no longer raises the rank of either matrix.
  bool early_stop = false;
  TolerancePolicy tolerance;
};

/// Full depth is 2n powers (0 .. 2n-1).
KrylovMatrices krylov_matrices(const QuadratureSystem& sys, KrylovVariant variant,
                               const KrylovOptions& options = {});

struct KrylovErrorBounds {
  double controllability = 0.0;
  double observability = 0.0;
};

/// Bounds on the rounding error accumulated while forming the Krylov matrices
/// by repeated multiplication; used as rank-threshold floors.
KrylovErrorBounds krylov_error_bounds(const QuadratureSystem& sys, KrylovVariant variant);

/// Im of the controllability matrix, rank decided with its error bound as floor.
SubspaceBasis controllable_subspace(const QuadratureSystem& sys, KrylovVariant variant,
                                    const TolerancePolicy& policy = {});
/// Ker of the observability matrix, rank decided with its error bound as floor.
SubspaceBasis unobservable_subspace(const QuadratureSystem& sys, KrylovVariant variant,
                                    const TolerancePolicy& policy = {});

/// T0 = diag(D, ..., D) diag(J, -J, ..., J, -J) J_{4nm}, relating the J R based
/// Krylov matrices: O = T0 Ctrl^#. It always preserves diag(J_2m, ..., J_2m); it
/// preserves J_4nm only for orthogonal D and even n. Throws ValidationError if D
/// is not symplectic.
Matrix t0_matrix(Index n, Index m, const Matrix& D);

/// Planted Kalman structure for random systems: sizes of the (co), (cbar-o / c-obar)
/// and (cbar-obar) mode groups. k + l + d must equal n.
struct PlantedStructure {
  Index k = 0;
  Index l = 0;
  Index d = 0;
};

struct RandomSystemOptions {
  enum class Scattering { exponential, identity };
  Scattering scattering = Scattering::exponential;
  /// When set, R and C are drawn with the sparsity that yields exactly these
  /// group sizes (generically), then hidden by a random symplectic change of
  /// coordinates.
  std::optional<PlantedStructure> planted;
  /// Scale of the non-orthogonal part of that change of coordinates.
  double shear = 0.1;
};

/// Deterministic per seed. R ~ symmetric standard normal, C ~ N(0, 1/(2m)),
/// Sigma = exp(J K) for K = (X + X^T)/4 with X standard normal, or I.
QuadratureSystem random_system(Index n, Index m, std::uint64_t seed,
                               const RandomSystemOptions& options = {});

/// exp(J K) for a random symmetric K with entries of size `scale`.
Matrix random_symplectic(Index k, std::uint64_t seed, double scale = 0.5);
/// Orthogonal symplectic [[Re U, Im U], [-Im U, Re U]] for a random unitary U.
Matrix random_orthogonal_symplectic(Index k, std::uint64_t seed);

}  // namespace lqss
