#include "lqss/kalman.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace lqss {

namespace {

constexpr std::array<StateGroup, 6> kGroups = {StateGroup::qa, StateGroup::qb, StateGroup::qc,
                                               StateGroup::pa, StateGroup::pb, StateGroup::pc};

StateClass class_of(StateGroup g) {
  switch (g) {
    case StateGroup::qa:
    case StateGroup::pa:
      return StateClass::co;
    case StateGroup::qb:
      return StateClass::cbar_o;
    case StateGroup::pb:
      return StateClass::c_obar;
    default:
      return StateClass::cbar_obar;
  }
}

const char* group_prefix(StateGroup g) {
  static constexpr const char* names[] = {"qa", "qb", "qc", "pa", "pb", "pc"};
  return names[static_cast<int>(g)];
}

double max_abs(const Matrix& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

std::vector<Index> all_rows(const Matrix& M) {
  std::vector<Index> out(static_cast<size_t>(M.rows()));
  for (Index i = 0; i < M.rows(); ++i) out[static_cast<size_t>(i)] = i;
  return out;
}

SubspaceBasis column_span(const Matrix& M, const std::vector<Index>& cols) {
  if (cols.empty()) return SubspaceBasis::zero(M.rows());
  return SubspaceBasis::span_of(select(M, all_rows(M), cols));
}

KalmanDecomposition assemble(const QuadratureSystem& sys, Matrix V, Index k, Index l, CanonicalE E) {
  KalmanDecomposition dec;
  dec.n = sys.modes();
  dec.m = sys.fields();
  dec.k = k;
  dec.l = l;
  dec.d = dec.n - k - l;
  dec.V = std::move(V);
  const Matrix Vinv = sharp_adjoint(dec.V);
  dec.A_hat = dec.V * sys.A() * Vinv;
  dec.B_hat = dec.V * sys.B();
  dec.C_hat = sys.C() * Vinv;
  dec.D = sys.D();
  dec.E = std::move(E);
  for (StateGroup g : kGroups) {
    for (Index i = 0; i < dec.size(g); ++i) dec.labels.push_back(class_of(g));
  }
  return dec;
}

double condition_number(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  const Vector& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

void require_symplectic_transform(const Matrix& T, Index n, double tol, const char* what) {
  if (T.rows() != 2 * n || T.cols() != 2 * n) {
    throw DimensionError(std::string(what) + " must be " + std::to_string(2 * n) + " x " +
                         std::to_string(2 * n));
  }
  require_finite(T, what);
  const auto sym = is_symplectic(T, tol);
  if (!sym) {
    throw ValidationError(std::string(what) + " symplectic", sym.residual,
                          std::string(what) + " is not symplectic: residual " + std::to_string(sym.residual));
  }
}

KalmanDecomposition checked(const QuadratureSystem& sys, KalmanDecomposition dec,
                            const KalmanOptions& options, const char* what) {
  dec.residuals = verify_decomposition(sys, dec, options.verify, options.tolerance);
  if (!dec.residuals.passed()) {
    throw ConsistencyError(std::string(what) + ": verification failed", dec.residuals);
  }
  return dec;
}

}  // namespace

const char* to_string(StateClass c) {
  switch (c) {
    case StateClass::co:
      return "co";
    case StateClass::cbar_o:
      return "cbar-o";
    case StateClass::c_obar:
      return "c-obar";
    default:
      return "cbar-obar";
  }
}

const char* to_string(ObservabilityBasis b) { return b == ObservabilityBasis::raw ? "raw" : "row-space"; }

// ---------------------------------------------------------------------------
// Observability structure

ObservabilityStructure observability_structure(const QuadratureSystem& sys, const TolerancePolicy& policy) {
  const Index n = sys.modes();
  ObservabilityStructure out;
  out.observability = krylov_matrices(sys, KrylovVariant::hamiltonian).observability;
  const Matrix& O = out.observability;

  TolerancePolicy p = policy;
  p.floor = std::max(p.floor, krylov_error_bounds(sys, KrylovVariant::hamiltonian).observability);
  Eigen::JacobiSVD<Matrix> svd(O, Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = sv(0);
  out.threshold = p.threshold(O.rows(), O.cols(), smax);
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > out.threshold) ++out.rank;
  }
  out.row_basis = svd.matrixV().leftCols(out.rank).transpose();

  Matrix M = O * jmat(n) * O.transpose();
  M = (0.5 * (M - M.transpose())).eval();
  const double tau_m = 2.0 * out.threshold * smax;
  out.skew_rank = numerical_rank(M, TolerancePolicy::fixed(tau_m)).rank;
  const auto form = skew_canonical(M, TolerancePolicy::fixed(tau_m));
  out.k = form.k;
  out.l = out.rank - 2 * out.k;
  for (Index i = 0; i < form.k; ++i) out.xi.push_back(std::sqrt(form.mus[static_cast<size_t>(i)]));
  return out;
}

// ---------------------------------------------------------------------------
// KalmanDecomposition views

Index KalmanDecomposition::size(StateGroup g) const {
  switch (g) {
    case StateGroup::qa:
    case StateGroup::pa:
      return k;
    case StateGroup::qb:
    case StateGroup::pb:
      return l;
    default:
      return d;
  }
}

Index KalmanDecomposition::offset(StateGroup g) const {
  Index off = 0;
  for (StateGroup h : kGroups) {
    if (h == g) return off;
    off += size(h);
  }
  return off;
}

std::vector<Index> KalmanDecomposition::indices(std::initializer_list<StateGroup> groups) const {
  std::vector<Index> out;
  for (StateGroup g : groups) {
    for (Index i = 0; i < size(g); ++i) out.push_back(offset(g) + i);
  }
  return out;
}

Matrix select(const Matrix& M, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Index>(i), static_cast<Index>(j)) = M(rows[i], cols[j]);
  return out;
}

Matrix KalmanDecomposition::A_co() const {
  const auto co = indices({StateGroup::qa, StateGroup::pa});
  return select(A_hat, co, co);
}
Matrix KalmanDecomposition::A_cbar_o() const {
  const auto b = indices({StateGroup::qb});
  return select(A_hat, b, b);
}
Matrix KalmanDecomposition::A_c_obar() const {
  const auto b = indices({StateGroup::pb});
  return select(A_hat, b, b);
}
Matrix KalmanDecomposition::A_cbar_obar() const {
  const auto c = indices({StateGroup::qc, StateGroup::pc});
  return select(A_hat, c, c);
}
Matrix KalmanDecomposition::A13() const {
  return select(A_hat, indices({StateGroup::qa, StateGroup::pa}), indices({StateGroup::qb}));
}
Matrix KalmanDecomposition::A21() const {
  return select(A_hat, indices({StateGroup::pb}), indices({StateGroup::qa, StateGroup::pa}));
}
Matrix KalmanDecomposition::A23() const {
  return select(A_hat, indices({StateGroup::pb}), indices({StateGroup::qb}));
}
Matrix KalmanDecomposition::A24() const {
  return select(A_hat, indices({StateGroup::pb}), indices({StateGroup::qc, StateGroup::pc}));
}
Matrix KalmanDecomposition::A43() const {
  return select(A_hat, indices({StateGroup::qc, StateGroup::pc}), indices({StateGroup::qb}));
}
Matrix KalmanDecomposition::B_co() const {
  Matrix Bt = B_hat.transpose();
  return select(Bt, all_rows(Bt), indices({StateGroup::qa, StateGroup::pa})).transpose();
}
Matrix KalmanDecomposition::B_c_obar() const {
  Matrix Bt = B_hat.transpose();
  return select(Bt, all_rows(Bt), indices({StateGroup::pb})).transpose();
}
Matrix KalmanDecomposition::C_co() const {
  return select(C_hat, all_rows(C_hat), indices({StateGroup::qa, StateGroup::pa}));
}
Matrix KalmanDecomposition::C_cbar_o() const {
  return select(C_hat, all_rows(C_hat), indices({StateGroup::qb}));
}

const std::vector<std::pair<int, int>>& a_hat_zero_blocks() {
  static const std::vector<std::pair<int, int>> blocks = {
      {1, 3}, {1, 5}, {1, 6}, {2, 1}, {2, 3}, {2, 4}, {2, 5}, {2, 6}, {3, 1},
      {3, 4}, {3, 5}, {4, 3}, {4, 5}, {4, 6}, {6, 1}, {6, 4}, {6, 5}};
  return blocks;
}

const std::vector<int>& b_hat_zero_rows() {
  static const std::vector<int> rows = {2, 3, 6};
  return rows;
}

const std::vector<int>& c_hat_zero_cols() {
  static const std::vector<int> cols = {3, 5, 6};
  return cols;
}

// ---------------------------------------------------------------------------
// Decomposition

KalmanDecomposition kalman_decompose(const QuadratureSystem& sys, const KalmanOptions& options) {
  const Index n = sys.modes();
  const ObservabilityStructure os = observability_structure(sys, options.tolerance);

  Matrix F;
  TolerancePolicy policy = options.tolerance;
  if (options.basis == ObservabilityBasis::raw) {
    F = os.observability;
    policy.floor = std::max(policy.floor, krylov_error_bounds(sys, KrylovVariant::hamiltonian).observability);
  } else if (os.rank == 0) {
    F = Matrix::Zero(1, 2 * n);
    policy = {};
  } else {
    // Perturbations of size threshold in O move its row space by at most
    // threshold / sigma_r.
    F = os.row_basis;
    policy = {};
    policy.floor = os.threshold / os.singular_values[static_cast<size_t>(os.rank - 1)];
  }

  const SymplecticFactorization fact = one_sided_symplectic_svd(F, policy, options.mode);
  if (fact.E.k != os.k || fact.E.l != os.l) {
    throw RankAmbiguityError("factorization counts (k=" + std::to_string(fact.E.k) + ", l=" +
                                 std::to_string(fact.E.l) + ") disagree with the observability matrix (k=" +
                                 std::to_string(os.k) + ", l=" + std::to_string(os.l) + ")",
                             os.singular_values, fact.spectra.skew_values, os.threshold);
  }

  KalmanDecomposition dec =
      assemble(sys, sharp_adjoint(fact.Z), os.k, os.l,
               CanonicalE::strict(os.observability.rows(), n, os.xi, os.l));
  dec.z_condition = fact.z_condition;
  dec.mode = options.mode;
  dec.basis = options.basis;
  return checked(sys, std::move(dec), options, "kalman_decompose");
}

KalmanDecomposition adopt_transform(const QuadratureSystem& sys, const Matrix& V, const KalmanOptions& options) {
  const Index n = sys.modes();
  require_symplectic_transform(V, n, options.verify.symplectic, "V");
  const ObservabilityStructure os = observability_structure(sys, options.tolerance);
  KalmanDecomposition dec =
      assemble(sys, V, os.k, os.l, CanonicalE::strict(os.observability.rows(), n, os.xi, os.l));
  dec.z_condition = condition_number(V);
  dec.mode = options.mode;
  dec.basis = options.basis;
  return checked(sys, std::move(dec), options, "adopt_transform");
}

// ---------------------------------------------------------------------------
// Verification

const std::vector<double>& transfer_frequencies() {
  static const std::vector<double> w = {0.173, 0.619, 1.414, 2.83, 6.07};
  return w;
}

double transfer_deviation(const QuadratureSystem& sys, const KalmanDecomposition& dec,
                          const std::vector<double>& frequencies) {
  double worst = 0.0;
  const Matrix A = sys.A();
  const Matrix B = sys.B();
  for (double w : frequencies) {
    const std::complex<double> s(0.0, w);
    const ComplexMatrix G = transfer_matrix(A, B, sys.C(), sys.D(), s);
    const ComplexMatrix Gh = transfer_matrix(dec.A_hat, dec.B_hat, dec.C_hat, dec.D, s);
    const double dev = (Gh - G).norm() / std::max(G.norm(), kTinyNorm);
    worst = std::max(worst, std::isfinite(dev) ? dev : std::numeric_limits<double>::infinity());
  }
  return worst;
}

CheckReport verify_decomposition(const QuadratureSystem& sys, const KalmanDecomposition& dec,
                                 const VerifyTolerances& tol, const TolerancePolicy& policy) {
  const Index n = sys.modes();
  const Index m = sys.fields();
  if (dec.n != n || dec.m != m || dec.V.rows() != 2 * n || dec.V.cols() != 2 * n ||
      dec.A_hat.rows() != 2 * n || dec.A_hat.cols() != 2 * n || dec.B_hat.rows() != 2 * n ||
      dec.B_hat.cols() != 2 * m || dec.C_hat.rows() != 2 * m || dec.C_hat.cols() != 2 * n ||
      dec.D.rows() != 2 * m || dec.D.cols() != 2 * m ||
      static_cast<Index>(dec.labels.size()) != 2 * n) {
    throw DimensionError("verify_decomposition: decomposition shapes do not match the system");
  }
  if (dec.k < 0 || dec.l < 0 || dec.d < 0 || dec.k + dec.l + dec.d != n) {
    throw DimensionError("verify_decomposition: group sizes do not add up to n");
  }

  CheckReport report;
  report.require_at_most("v_symplectic", is_symplectic(dec.V).residual, tol.symplectic, "||V V^# - I||_F");

  const Matrix Vinv = sharp_adjoint(dec.V);
  const Matrix Ah = dec.V * sys.A() * Vinv;
  const Matrix Bh = dec.V * sys.B();
  const Matrix Ch = sys.C() * Vinv;

  std::array<Index, 7> off{};
  for (size_t g = 0; g < 6; ++g) off[g + 1] = off[g] + dec.size(kGroups[g]);
  auto rows_of = [&](int b) {
    return std::pair<Index, Index>{off[static_cast<size_t>(b - 1)],
                                   off[static_cast<size_t>(b)] - off[static_cast<size_t>(b - 1)]};
  };

  double pa = 0.0;
  for (const auto& [i, j] : a_hat_zero_blocks()) {
    const auto [r0, rn] = rows_of(i);
    const auto [c0, cn] = rows_of(j);
    pa = std::max(pa, max_abs(Ah.block(r0, c0, rn, cn)));
  }
  double pb = 0.0;
  for (int i : b_hat_zero_rows()) {
    const auto [r0, rn] = rows_of(i);
    pb = std::max(pb, max_abs(Bh.middleRows(r0, rn)));
  }
  double pc = 0.0;
  for (int j : c_hat_zero_cols()) {
    const auto [c0, cn] = rows_of(j);
    pc = std::max(pc, max_abs(Ch.middleCols(c0, cn)));
  }
  report.require_at_most("pattern_A", pa / (1.0 + Ah.norm()), tol.pattern,
                         "max |entry| over zero blocks of A^, relative to 1 + ||A^||_F");
  report.require_at_most("pattern_B", pb / (1.0 + Bh.norm()), tol.pattern,
                         "max |entry| over zero rows of B^, relative to 1 + ||B^||_F");
  report.require_at_most("pattern_C", pc / (1.0 + Ch.norm()), tol.pattern,
                         "max |entry| over zero columns of C^, relative to 1 + ||C^||_F");

  const double stored =
      std::max({(dec.A_hat - Ah).norm() / (1.0 + Ah.norm()), (dec.B_hat - Bh).norm() / (1.0 + Bh.norm()),
                (dec.C_hat - Ch).norm() / (1.0 + Ch.norm()),
                (dec.D - sys.D()).norm() / (1.0 + sys.D().norm())});
  report.require_at_most("stored_matrices", stored, tol.stored, "stored A^, B^, C^, D against V");

  const ObservabilityStructure os = observability_structure(sys, policy);
  report.require_equal("k_oracle", 2 * dec.k, os.skew_rank,
                       "2k = " + std::to_string(2 * dec.k) + ", rank(O J O^T) = " + std::to_string(os.skew_rank));
  report.require_equal("l_oracle", dec.l, os.rank - 2 * dec.k,
                       "l = " + std::to_string(dec.l) + ", rank(O) - 2k = " + std::to_string(os.rank - 2 * dec.k));

  const SubspaceBasis ctrl = controllable_subspace(sys, KrylovVariant::hamiltonian, policy);
  const SubspaceBasis unobs = unobservable_subspace(sys, KrylovVariant::hamiltonian, policy);
  const SubspaceBasis ctrl_hat =
      column_span(Vinv, dec.indices({StateGroup::qa, StateGroup::pa, StateGroup::pb}));
  const SubspaceBasis unobs_hat =
      column_span(Vinv, dec.indices({StateGroup::pb, StateGroup::qc, StateGroup::pc}));
  report.require_at_most("controllable_angle", subspace_distance(ctrl, ctrl_hat), tol.angle,
                         "dim " + std::to_string(ctrl.dim()) + " vs " + std::to_string(ctrl_hat.dim()));
  report.require_at_most("unobservable_angle", subspace_distance(unobs, unobs_hat), tol.angle,
                         "dim " + std::to_string(unobs.dim()) + " vs " + std::to_string(unobs_hat.dim()));

  long long wrong = 0;
  long long cbar_o = 0, c_obar = 0;
  {
    size_t i = 0;
    for (StateGroup g : kGroups) {
      for (Index j = 0; j < dec.size(g); ++j, ++i) {
        if (dec.labels[i] != class_of(g)) ++wrong;
      }
    }
    for (StateClass c : dec.labels) {
      if (c == StateClass::cbar_o) ++cbar_o;
      if (c == StateClass::c_obar) ++c_obar;
    }
  }
  report.require_equal("labels", wrong, 0, std::to_string(wrong) + " mislabelled states");
  report.require_equal("conjugate_counts", cbar_o, c_obar,
                       "cbar-o " + std::to_string(cbar_o) + ", c-obar " + std::to_string(c_obar));
  report.require_at_most("transfer_invariance", transfer_deviation(sys, dec), tol.transfer,
                         "relative deviation of the transfer matrix on the imaginary axis");
  return report;
}

// ---------------------------------------------------------------------------
// Refinement

KalmanDecomposition refine(const QuadratureSystem& sys, const KalmanDecomposition& dec,
                           const RefinementPair& pair, const KalmanOptions& options) {
  const Index n = sys.modes();
  const CanonicalE& E = dec.E;
  const Index s = E.s;
  if (pair.X.rows() != s || pair.X.cols() != s) {
    throw DimensionError("refine: X must be " + std::to_string(s) + " x " + std::to_string(s));
  }
  require_finite(pair.X, "X");
  require_symplectic_transform(pair.Y, n, options.verify.symplectic, "Y");
  const double cond_x = condition_number(pair.X);
  if (!(cond_x < 1e12)) throw ValidationError("X invertible", cond_x, "refine: X is singular");

  const Index k = E.k, l = E.l, r = E.r, d = r - k - l;
  const Matrix P = pair.X * E.materialize() * pair.Y;
  const double limit = options.verify.pattern * (1.0 + P.norm());

  const std::array<Index, 4> row_sizes = {k, l, k, s - 2 * k - l};
  const std::array<Index, 6> col_sizes = {k, l, d, k, l, d};
  auto block_of = [](Index idx, const auto& sizes) {
    int b = 0;
    for (Index acc = sizes[0]; idx >= acc; acc += sizes[static_cast<size_t>(b)]) ++b;
    return b + 1;
  };
  auto in_pattern = [&](Index i, Index j) {
    if (i < k) return j == i;
    if (i < k + l) return j == i;
    if (i < 2 * k + l) return j == r + (i - k - l);
    return false;
  };

  std::vector<std::pair<int, int>> bad;
  auto flag = [&](Index i, Index j) {
    const std::pair<int, int> b{block_of(i, row_sizes), block_of(j, col_sizes)};
    if (std::find(bad.begin(), bad.end(), b) == bad.end()) bad.push_back(b);
  };
  for (Index i = 0; i < s; ++i) {
    for (Index j = 0; j < 2 * r; ++j) {
      const double v = std::abs(P(i, j));
      if (in_pattern(i, j) ? v <= limit : v > limit) flag(i, j);
    }
  }
  if (!bad.empty()) {
    std::sort(bad.begin(), bad.end());
    std::string where;
    for (const auto& [i, j] : bad) where += " (" + std::to_string(i) + "," + std::to_string(j) + ")";
    throw RefinementRejected("refine: X E Y breaks the canonical pattern at blocks" + where, bad);
  }

  KalmanDecomposition out = assemble(sys, sharp_adjoint(pair.Y) * dec.V, k, l, E);
  out.z_condition = condition_number(out.V);
  out.mode = dec.mode;
  out.basis = dec.basis;
  return checked(sys, std::move(out), options, "refine");
}

std::vector<StateInfo> classify_states(const KalmanDecomposition& dec) {
  std::vector<StateInfo> out;
  for (StateGroup g : kGroups) {
    for (Index i = 0; i < dec.size(g); ++i) {
      StateInfo info;
      info.index = dec.offset(g) + i;
      info.name = std::string(group_prefix(g)) + std::to_string(i + 1);
      info.label = dec.labels[static_cast<size_t>(info.index)];
      info.row = dec.V.row(info.index).transpose();
      out.push_back(std::move(info));
    }
  }
  return out;
}

}  // namespace lqss
