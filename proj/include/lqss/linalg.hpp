#pragma once

// Dense real matrix utilities specialised to the symplectic structure
// J_{2k} = [[0, I_k], [-I_k, 0]].

#include "lqss/error.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace lqss {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Below this Frobenius norm a matrix is treated as zero and only absolute
/// tolerances apply.
inline constexpr double kTinyNorm = 1e-300;

/// Singular-value threshold used for every rank decision.
///
/// threshold = scale * max(max(rows, cols) * eps * sigma_max, floor), or
/// `absolute` when set. `floor` carries a known bound on the data error of the
/// input (e.g. rounding accumulated while forming Krylov powers).
struct TolerancePolicy {
  double scale = 1.0;
  double floor = 0.0;
  std::optional<double> absolute;

  double threshold(Index rows, Index cols, double sigma_max) const;

  static TolerancePolicy fixed(double tau) {
    TolerancePolicy p;
    p.absolute = tau;
    return p;
  }
};

/// J_{2k}. Throws DimensionError for k == 0.
Matrix jmat(Index k);

/// X^# = -J_{2s} X^T J_{2r} for a 2r x 2s matrix X. Throws StructureError on odd sizes.
Matrix sharp_adjoint(const Matrix& X);
/// Complex variant, X^# = -J X^H J.
ComplexMatrix sharp_adjoint(const ComplexMatrix& X);

/// omega(u, v) = u^T J v.
double symplectic_form(const Vector& u, const Vector& v);

struct SymplecticTest {
  bool symplectic = false;
  double residual = 0.0;  ///< ||T T^# - I||_F
  explicit operator bool() const noexcept { return symplectic; }
};

SymplecticTest is_symplectic(const Matrix& T, double tol = 1e-9);

/// ||Q^T Q - I||_F.
double orthogonality_residual(const Matrix& Q);

/// Throws ValidationError if any entry is NaN or infinite.
void require_finite(const Matrix& M, const char* what);

/// Orthonormal basis of a subspace of R^ambient.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;
  /// Takes ownership of a basis whose columns must already be orthonormal.
  explicit SubspaceBasis(Matrix basis, double tol = 1e-9);

  static SubspaceBasis full(Index ambient);
  static SubspaceBasis zero(Index ambient);
  /// Orthonormal basis for the column span of `columns` (rank-revealing).
  static SubspaceBasis span_of(const Matrix& columns, const TolerancePolicy& policy = {});

  Index ambient_dim() const noexcept { return basis_.rows(); }
  Index dim() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }

  Matrix projector() const { return basis_ * basis_.transpose(); }
  SubspaceBasis orthogonal_complement() const;
  /// Distance of v from the subspace, ||v - P v||.
  double distance(const Vector& v) const;

 private:
  Matrix basis_;
};

struct RankDecomposition {
  Index rank = 0;
  double threshold = 0.0;
  std::vector<double> singular_values;  ///< descending
  SubspaceBasis image;                  ///< column space, in R^rows
  SubspaceBasis coimage;                ///< row space, in R^cols
  SubspaceBasis kernel;                 ///< in R^cols
};

RankDecomposition numerical_rank(const Matrix& F, const TolerancePolicy& policy = {});

/// Orthogonal reduction of a skew-symmetric M:
/// U^T M U = blockdiag(mu_1 J_2, ..., mu_k J_2, 0), mu descending.
struct SkewCanonicalForm {
  Matrix U;
  std::vector<double> mus;
  Index k = 0;

  Matrix block_form() const;
  Vector u(Index i) const { return U.col(2 * i); }
  Vector v(Index i) const { return U.col(2 * i + 1); }
};

/// Blocks with mu <= policy.threshold(s, s, mu_max) are folded into the zero part.
/// The input is symmetrised to (M - M^T)/2 after checking
/// ||M + M^T||_F <= skew_tol * ||M||_F.
SkewCanonicalForm skew_canonical(const Matrix& M, const TolerancePolicy& policy,
                                 double skew_tol = 1e-10);
/// Relative threshold: blocks with mu <= tol * ||M||_F are dropped.
SkewCanonicalForm skew_canonical(const Matrix& M, double tol = 1e-12);

/// Extends the isotropic columns x_1..x_t (all inside `within`) to a symplectic
/// basis of `within`. Returns T = [x_1..x_t, a_1..a_c, y_1..y_t, b_1..b_c] with
/// T^T J T = J_{2w}, where y_i are partners of x_i and (a, b) complete the basis.
/// Pass an empty (2r x 0) matrix to get a symplectic basis of `within` itself.
Matrix symplectic_complete(const Matrix& isotropic, const SubspaceBasis& within,
                           double tol = 1e-10);
Matrix symplectic_complete(const Matrix& isotropic, double tol = 1e-10);

/// Principal angles in radians, ordered by descending cosine (ascending angle).
/// Returns min(dim A, dim B) angles.
std::vector<double> principal_angles(const SubspaceBasis& a, const SubspaceBasis& b);

/// Largest principal angle, or pi/2 when the dimensions differ.
double subspace_distance(const SubspaceBasis& a, const SubspaceBasis& b);

}  // namespace lqss
