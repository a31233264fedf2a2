#pragma once

// Kalman decomposition of an LQSS by a symplectic change of coordinates
// (q^, p^) = V (q, p). Transformed states are ordered
//
//   (q^_a[k], q^_b[l], q^_c[d], p^_a[k], p^_b[l], p^_c[d])
//
// with q^_a, p^_a controllable and observable, q^_b uncontrollable but
// observable, p^_b controllable but unobservable and q^_c, p^_c neither.

#include "lqss/factorization.hpp"
#include "lqss/model.hpp"
#include "lqss/report.hpp"

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace lqss {

enum class StateClass { co, cbar_o, c_obar, cbar_obar };

/// "co", "cbar-o", "c-obar", "cbar-obar".
const char* to_string(StateClass c);

enum class StateGroup { qa, qb, qc, pa, pb, pc };

/// How the observability matrix is handed to the factorization.
enum class ObservabilityBasis {
  /// Factorize an orthonormal basis of its row space. Same kernel and skew
  /// structure, far better conditioned Z.
  row_space,
  /// Factorize the observability matrix itself.
  raw,
};

const char* to_string(ObservabilityBasis b);

struct VerifyTolerances {
  double symplectic = 1e-9;
  double pattern = 1e-8;  ///< relative to 1 + ||.||_F of the transformed matrix
  double angle = 1e-7;
  double stored = 1e-9;
  double transfer = 1e-7;
};

struct KalmanOptions {
  TolerancePolicy tolerance;
  FactorizationMode mode = FactorizationMode::strict;
  ObservabilityBasis basis = ObservabilityBasis::row_space;
  VerifyTolerances verify;
};

/// Counts and canonical values read off the observability matrix.
struct ObservabilityStructure {
  Matrix observability;
  double threshold = 0.0;  ///< rank threshold used for it (Krylov error floor included)
  Index rank = 0;
  Index skew_rank = 0;  ///< SVD rank of O J O^T at threshold 2 * threshold * sigma_max(O)
  Index k = 0;
  Index l = 0;
  std::vector<double> singular_values;
  Matrix row_basis;  ///< rank x 2n, orthonormal rows spanning the row space
  std::vector<double> xi;  ///< sqrt of the skew values of O J O^T above threshold, descending
};

ObservabilityStructure observability_structure(const QuadratureSystem& sys,
                                               const TolerancePolicy& policy = {});

struct KalmanDecomposition {
  Index n = 0;
  Index m = 0;
  Index k = 0;
  Index l = 0;
  Index d = 0;
  Matrix V;
  Matrix A_hat;
  Matrix B_hat;
  Matrix C_hat;
  Matrix D;
  CanonicalE E;  ///< canonical E of the observability matrix
  std::vector<StateClass> labels;
  CheckReport residuals;
  double z_condition = 1.0;
  FactorizationMode mode = FactorizationMode::strict;
  ObservabilityBasis basis = ObservabilityBasis::row_space;

  Index size(StateGroup g) const;
  Index offset(StateGroup g) const;
  std::vector<Index> indices(std::initializer_list<StateGroup> groups) const;

  /// V^-1 = V^#.
  Matrix V_inverse() const { return sharp_adjoint(V); }

  // Classical Kalman blocks with x_co = (q_a, p_a), x_cbar-o = q_b, x_c-obar = p_b,
  // x_cbar-obar = (q_c, p_c).
  Matrix A_co() const;
  Matrix A_cbar_o() const;
  Matrix A_c_obar() const;
  Matrix A_cbar_obar() const;
  Matrix A13() const;
  Matrix A21() const;
  Matrix A23() const;
  Matrix A24() const;
  Matrix A43() const;
  Matrix B_co() const;
  Matrix B_c_obar() const;
  Matrix C_co() const;
  Matrix C_cbar_o() const;
};

/// Rows/cols of M picked by index lists.
Matrix select(const Matrix& M, const std::vector<Index>& rows, const std::vector<Index>& cols);

/// Mandated zero blocks of A^ on the 6 x 6 group grid, 1-based (row, col).
const std::vector<std::pair<int, int>>& a_hat_zero_blocks();
/// Zero block rows of B^ and zero block columns of C^ on the same grid, 1-based.
const std::vector<int>& b_hat_zero_rows();
const std::vector<int>& c_hat_zero_cols();

/// Factorizes the observability matrix, sets V = Z^-1 and verifies the result.
/// Throws RankAmbiguityError, or ConsistencyError if the verification fails.
KalmanDecomposition kalman_decompose(const QuadratureSystem& sys, const KalmanOptions& options = {});

/// Builds a decomposition for a caller-supplied symplectic V, with (k, l) taken
/// from the observability structure. Throws ValidationError if V is not
/// symplectic and ConsistencyError if it does not produce the Kalman pattern.
KalmanDecomposition adopt_transform(const QuadratureSystem& sys, const Matrix& V,
                                    const KalmanOptions& options = {});

/// Frequencies (s = i w) used by the transfer-function check.
const std::vector<double>& transfer_frequencies();

/// max over s of ||G^(s) - G(s)||_F / ||G(s)||_F.
double transfer_deviation(const QuadratureSystem& sys, const KalmanDecomposition& dec,
                          const std::vector<double>& frequencies = transfer_frequencies());

/// Recomputes every invariant of `dec` against the system. Never throws for
/// failed checks; throws DimensionError if the shapes do not match.
CheckReport verify_decomposition(const QuadratureSystem& sys, const KalmanDecomposition& dec,
                                 const VerifyTolerances& tol = {}, const TolerancePolicy& policy = {});

struct RefinementPair {
  Matrix X;  ///< invertible, size of the observability matrix's row count
  Matrix Y;  ///< symplectic 2n x 2n
};

/// X E Y left the canonical pattern or zeroed a stored diagonal entry.
class RefinementRejected : public InputError {
 public:
  RefinementRejected(const std::string& message, std::vector<std::pair<int, int>> blocks)
      : InputError(message), blocks_(std::move(blocks)) {}

  /// 1-based (block row, block col) on the grid rows [k, l, k, rest] x cols [k, l, d, k, l, d].
  const std::vector<std::pair<int, int>>& blocks() const noexcept { return blocks_; }

 private:
  std::vector<std::pair<int, int>> blocks_;
};

/// V' = Y^-1 V after checking that X E Y keeps the canonical pattern with
/// nonzero diagonals. The result is re-verified.
KalmanDecomposition refine(const QuadratureSystem& sys, const KalmanDecomposition& dec,
                           const RefinementPair& pair, const KalmanOptions& options = {});

struct StateInfo {
  Index index = 0;
  std::string name;  ///< e.g. "qa1", "pb2"
  StateClass label = StateClass::co;
  Vector row;  ///< the transformed state as a combination of (q, p)
};

std::vector<StateInfo> classify_states(const KalmanDecomposition& dec);

}  // namespace lqss
