#pragma once

// One-sided symplectic SVD-like factorization F = Q E Z^-1 of a real s x 2r
// matrix, with Q orthogonal (or merely invertible), Z symplectic and E of the
// canonical form
//
//          cols: k    l    r-k-l  k    r-k
//   rows k     [ Xi   0    0      0    0 ]
//        l     [ 0    I_l  0      0    0 ]
//        k     [ 0    0    0      Xi'  0 ]
//        rest  [ 0    0    0      0    0 ]

#include "lqss/linalg.hpp"
#include "lqss/report.hpp"

#include <vector>

namespace lqss {

enum class FactorizationMode {
  strict,   ///< Q orthogonal, xi_mid == xi_top, ones_block == 1
  relaxed,  ///< arbitrary positive diagonals; Z columns balanced for conditioning
};

const char* to_string(FactorizationMode mode);

struct CanonicalE {
  Index s = 0;
  Index r = 0;
  Index k = 0;
  Index l = 0;
  std::vector<double> xi_top;
  std::vector<double> xi_mid;
  std::vector<double> ones_block;

  /// Strict-mode E with twin Xi blocks and an identity middle block.
  static CanonicalE strict(Index s, Index r, std::vector<double> xi, Index l);

  /// Throws StructureError if counts, lengths or positivity are violated.
  void validate() const;
  Matrix materialize() const;

  /// Column indices of the zero columns of E (a basis of Ker E).
  std::vector<Index> kernel_columns() const;
};

/// Spectra behind the rank decisions, for diagnostics.
struct FactorizationSpectra {
  std::vector<double> singular_values;  ///< of F
  std::vector<double> skew_values;      ///< canonical values of F J F^T (all, descending)
  double rank_threshold = 0.0;
  double skew_threshold = 0.0;
};

struct SymplecticFactorization {
  Matrix Q;
  CanonicalE E;
  Matrix Z;
  FactorizationMode mode = FactorizationMode::strict;
  double residual = 0.0;  ///< ||F Z - Q E||_F
  double z_condition = 0.0;
  double q_condition = 0.0;
  FactorizationSpectra spectra;
};

/// k = rank(F J F^T) / 2 and l = rank(F) - 2k under `policy`. The threshold
/// for F J F^T is 2 * tau_F * sigma_max(F), the error that a perturbation of
/// size tau_F in F induces. Throws RankAmbiguityError when the decisions are
/// inconsistent (odd rank, l < 0, k + l > r, rank of the residual operator
/// falling below the threshold).
SymplecticFactorization one_sided_symplectic_svd(const Matrix& F, const TolerancePolicy& policy = {},
                                                 FactorizationMode mode = FactorizationMode::strict);

/// Checks: reconstruction, Z symplecticity, Q orthogonality (strict) or
/// conditioning (relaxed), E pattern and positivity, twin blocks (strict),
/// k and l against SVD-based oracles, Ker F against Z Ker E.
CheckReport verify_factorization(const Matrix& F, const SymplecticFactorization& fact, double tol = 1e-8,
                                 const TolerancePolicy& oracle_policy = {});

}  // namespace lqss
