#include "lqss/factorization.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lqss {

namespace {

double condition_number(const Matrix& M) {
  if (M.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const Vector& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

// J X without forming J.
Matrix apply_j(const Matrix& X) {
  const Index h = X.rows() / 2;
  Matrix out(X.rows(), X.cols());
  out.topRows(h) = X.bottomRows(h);
  out.bottomRows(h) = -X.topRows(h);
  return out;
}

std::vector<double> to_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

const char* to_string(FactorizationMode mode) {
  return mode == FactorizationMode::strict ? "strict" : "relaxed";
}

// ---------------------------------------------------------------------------
// CanonicalE

CanonicalE CanonicalE::strict(Index s, Index r, std::vector<double> xi, Index l) {
  CanonicalE e;
  e.s = s;
  e.r = r;
  e.k = static_cast<Index>(xi.size());
  e.l = l;
  e.xi_top = xi;
  e.xi_mid = std::move(xi);
  e.ones_block.assign(static_cast<size_t>(l), 1.0);
  return e;
}

void CanonicalE::validate() const {
  if (s < 1 || r < 1) throw StructureError("E: sizes must be positive");
  if (k < 0 || l < 0 || k + l > r || 2 * k + l > s) {
    throw StructureError("E: counts k=" + std::to_string(k) + " l=" + std::to_string(l) +
                         " do not fit a " + std::to_string(s) + "x" + std::to_string(2 * r) + " matrix");
  }
  if (static_cast<Index>(xi_top.size()) != k || static_cast<Index>(xi_mid.size()) != k ||
      static_cast<Index>(ones_block.size()) != l) {
    throw StructureError("E: diagonal lengths do not match k and l");
  }
  auto positive = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x) && x > 0.0; });
  };
  if (!positive(xi_top) || !positive(xi_mid) || !positive(ones_block)) {
    throw StructureError("E: stored diagonal entries must be positive");
  }
}

Matrix CanonicalE::materialize() const {
  validate();
  Matrix E = Matrix::Zero(s, 2 * r);
  for (Index i = 0; i < k; ++i) {
    E(i, i) = xi_top[static_cast<size_t>(i)];
    E(k + l + i, r + i) = xi_mid[static_cast<size_t>(i)];
  }
  for (Index i = 0; i < l; ++i) E(k + i, k + i) = ones_block[static_cast<size_t>(i)];
  return E;
}

std::vector<Index> CanonicalE::kernel_columns() const {
  std::vector<Index> cols;
  for (Index j = k + l; j < r; ++j) cols.push_back(j);
  for (Index j = r + k; j < 2 * r; ++j) cols.push_back(j);
  return cols;
}

// ---------------------------------------------------------------------------
// Factorization

SymplecticFactorization one_sided_symplectic_svd(const Matrix& F, const TolerancePolicy& policy,
                                                 FactorizationMode mode) {
  const Index s = F.rows();
  if (s < 1 || F.cols() < 2) throw DimensionError("factorization: F must be at least 1 x 2");
  if (F.cols() % 2 != 0) {
    throw StructureError("factorization: F must have an even number of columns, got " +
                         std::to_string(F.cols()));
  }
  require_finite(F, "F");
  const Index r = F.cols() / 2;

  Eigen::JacobiSVD<Matrix> fsvd(F);
  const Vector& sf = fsvd.singularValues();
  const double smax = sf(0);
  const double tau_f = policy.threshold(s, 2 * r, smax);
  Index rank_f = 0;
  for (Index i = 0; i < sf.size(); ++i) {
    if (sf(i) > tau_f) ++rank_f;
  }

  Matrix M = F * apply_j(F.transpose());
  M = (0.5 * (M - M.transpose())).eval();
  const double tau_m = 2.0 * tau_f * smax;
  const SkewCanonicalForm form = skew_canonical(M, TolerancePolicy::fixed(0.0));
  Index k = 0;
  for (double mu : form.mus) {
    if (mu > tau_m) ++k;
  }

  SymplecticFactorization out;
  out.mode = mode;
  out.spectra.singular_values = to_vector(sf);
  out.spectra.skew_values = form.mus;
  out.spectra.rank_threshold = tau_f;
  out.spectra.skew_threshold = tau_m;

  auto ambiguous = [&](const std::string& why) {
    return RankAmbiguityError("rank decision is ambiguous: " + why, out.spectra.singular_values,
                              out.spectra.skew_values, tau_f);
  };

  const Index rank_m = numerical_rank(M, TolerancePolicy::fixed(tau_m)).rank;
  if (rank_m != 2 * k) {
    throw ambiguous("rank(F J F^T) = " + std::to_string(rank_m) + " is not twice the number of " +
                    "skew blocks " + std::to_string(k));
  }
  const Index l = rank_f - 2 * k;
  if (l < 0) throw ambiguous("rank(F) = " + std::to_string(rank_f) + " < 2k = " + std::to_string(2 * k));
  if (k + l > r) {
    throw ambiguous("k + l = " + std::to_string(k + l) + " exceeds r = " + std::to_string(r));
  }
  const Index d = r - k - l;

  // Pairs carrying the skew part: F z = xi u, F z' = xi v, omega(z, z') = 1.
  Matrix Z1(2 * r, k), Z2(2 * r, k);
  std::vector<double> xi(static_cast<size_t>(k));
  const Matrix JFt = apply_j(F.transpose());
  for (Index c = 0; c < k; ++c) {
    const double root = std::sqrt(form.mus[static_cast<size_t>(c)]);
    xi[static_cast<size_t>(c)] = root;
    Z1.col(c) = JFt * form.v(c) / root;
    Z2.col(c) = -JFt * form.u(c) / root;
  }

  // Symplectic projection onto the omega-complement of span{Z1, Z2}.
  Matrix Pi = Matrix::Identity(2 * r, 2 * r);
  if (k > 0) Pi += -Z1 * apply_j(Z2).transpose() + Z2 * apply_j(Z1).transpose();
  const Matrix G = F * Pi;

  Matrix Y1(2 * r, l), Y2(2 * r, l), Qb(s, l);
  if (l > 0) {
    Eigen::JacobiSVD<Matrix> gsvd(G, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sg = gsvd.singularValues();
    if (sg(l - 1) <= tau_f) {
      throw ambiguous("the isotropic part of F has numerical rank below l = " + std::to_string(l));
    }
    const Matrix JGt = apply_j(G.transpose());
    for (Index i = 0; i < l; ++i) {
      Qb.col(i) = gsvd.matrixU().col(i);
      Y1.col(i) = Pi * gsvd.matrixV().col(i) / sg(i);
      Y2.col(i) = -JGt * Qb.col(i);
    }
    // Make span{Y1} isotropic without disturbing F Y1.
    const Matrix Omega = Y1.transpose() * apply_j(Y1);
    Y1 += 0.5 * Y2 * Omega.transpose();
  }

  // Symplectic basis of what is left.
  Matrix W1(2 * r, d), W2(2 * r, d);
  if (d > 0) {
    Matrix N;
    if (k + l > 0) {
      Matrix S(2 * r, 2 * (k + l));
      S << Z1, Y1, Z2, Y2;
      const Matrix constraint = apply_j(S).transpose();
      Eigen::JacobiSVD<Matrix> csvd(constraint, Eigen::ComputeFullV);
      N = csvd.matrixV().rightCols(2 * d);
    } else {
      N = Matrix::Identity(2 * r, 2 * r);
    }
    const Matrix W = symplectic_complete(Matrix(2 * r, 0), SubspaceBasis(N));
    W1 = W.leftCols(d);
    W2 = W.rightCols(d);
  }

  std::vector<double> xi_top = xi, xi_mid = xi, ones(static_cast<size_t>(l), 1.0);
  if (mode == FactorizationMode::relaxed) {
    for (Index c = 0; c < k; ++c) {
      const double alpha = std::sqrt(Z2.col(c).norm() / Z1.col(c).norm());
      Z1.col(c) *= alpha;
      Z2.col(c) /= alpha;
      xi_top[static_cast<size_t>(c)] *= alpha;
      xi_mid[static_cast<size_t>(c)] /= alpha;
    }
    for (Index i = 0; i < l; ++i) {
      const double beta = std::sqrt(Y2.col(i).norm() / Y1.col(i).norm());
      Y1.col(i) *= beta;
      Y2.col(i) /= beta;
      ones[static_cast<size_t>(i)] = beta;
    }
  }

  out.Z.resize(2 * r, 2 * r);
  out.Z << Z1, Y1, W1, Z2, Y2, W2;

  const Index used = 2 * k + l;
  Matrix Qpart(s, used);
  for (Index c = 0; c < k; ++c) {
    Qpart.col(c) = form.u(c);
    Qpart.col(k + l + c) = form.v(c);
  }
  Qpart.middleCols(k, l) = Qb;
  out.Q.resize(s, s);
  out.Q.leftCols(used) = Qpart;
  if (used < s) {
    if (used == 0) {
      out.Q.rightCols(s) = Matrix::Identity(s, s);
    } else {
      Eigen::JacobiSVD<Matrix> qsvd(Qpart, Eigen::ComputeFullU);
      out.Q.rightCols(s - used) = qsvd.matrixU().rightCols(s - used);
    }
  }

  out.E.s = s;
  out.E.r = r;
  out.E.k = k;
  out.E.l = l;
  out.E.xi_top = std::move(xi_top);
  out.E.xi_mid = std::move(xi_mid);
  out.E.ones_block = std::move(ones);

  out.residual = (F * out.Z - out.Q * out.E.materialize()).norm();
  out.z_condition = condition_number(out.Z);
  out.q_condition = condition_number(out.Q);
  return out;
}

// ---------------------------------------------------------------------------
// Verification

CheckReport verify_factorization(const Matrix& F, const SymplecticFactorization& fact, double tol,
                                 const TolerancePolicy& oracle_policy) {
  const Index s = F.rows();
  const Index r = F.cols() / 2;
  if (F.cols() % 2 != 0 || fact.Q.rows() != s || fact.Q.cols() != s || fact.Z.rows() != 2 * r ||
      fact.Z.cols() != 2 * r || fact.E.s != s || fact.E.r != r) {
    throw DimensionError("verify_factorization: factorization does not match F's shape");
  }

  CheckReport report;
  const double inf = std::numeric_limits<double>::infinity();

  Matrix E;
  try {
    E = fact.E.materialize();
    report.require_at_most("e_pattern", 0.0, 0.0);
  } catch (const StructureError& e) {
    report.require_at_most("e_pattern", inf, 0.0, e.what());
    E = Matrix::Zero(s, 2 * r);
  }

  const double recon = (F * fact.Z - fact.Q * E).norm();
  report.require_at_most("reconstruction", recon / std::max(1.0, F.norm()), tol,
                         "||F Z - Q E||_F / max(1, ||F||_F)");
  report.require_at_most("z_symplectic", is_symplectic(fact.Z).residual, tol, "||Z Z^# - I||_F");

  if (fact.mode == FactorizationMode::strict) {
    report.require_at_most("q_orthogonal", orthogonality_residual(fact.Q), tol, "||Q^T Q - I||_F");
    double twin = 0.0;
    double ones = 0.0;
    if (fact.E.xi_top.size() == fact.E.xi_mid.size()) {
      for (size_t i = 0; i < fact.E.xi_top.size(); ++i) {
        twin = std::max(twin, std::abs(fact.E.xi_top[i] - fact.E.xi_mid[i]) /
                                  std::max(1.0, fact.E.xi_top[i]));
      }
    } else {
      twin = inf;
    }
    for (double x : fact.E.ones_block) ones = std::max(ones, std::abs(x - 1.0));
    report.require_at_most("xi_twin", twin, tol, "max |xi_top - xi_mid| relative");
    report.require_at_most("ones_block", ones, tol, "max |e - 1| over the identity block");
  } else {
    report.require_at_most("q_condition", condition_number(fact.Q), 1.0 / tol, "cond(Q)");
  }

  // Oracles built from plain SVD rank counts.
  const RankDecomposition rf = numerical_rank(F, oracle_policy);
  const double smax = rf.singular_values.empty() ? 0.0 : rf.singular_values.front();
  Matrix M = F * jmat(r) * F.transpose();
  M = (0.5 * (M - M.transpose())).eval();
  const Index rank_m = numerical_rank(M, TolerancePolicy::fixed(2.0 * rf.threshold * smax)).rank;
  report.require_equal("k_oracle", 2 * fact.E.k, rank_m, "2k = " + std::to_string(2 * fact.E.k) +
                                                             ", rank(F J F^T) = " + std::to_string(rank_m));
  report.require_equal("l_oracle", fact.E.l, rf.rank - 2 * fact.E.k);

  // Ker F = Z Ker E.
  const auto cols = fact.E.kernel_columns();
  Matrix ZK(2 * r, static_cast<Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) ZK.col(static_cast<Index>(j)) = fact.Z.col(cols[j]);
  const SubspaceBasis zk = cols.empty() ? SubspaceBasis::zero(2 * r) : SubspaceBasis::span_of(ZK);
  report.require_at_most("kernel_angle", subspace_distance(rf.kernel, zk), std::max(tol, 1e-7),
                         "largest principal angle between Ker F and Z Ker E");
  return report;
}

}  // namespace lqss
