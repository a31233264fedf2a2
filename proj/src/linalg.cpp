#include "lqss/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>

namespace lqss {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_even(Index n, const char* what) {
  if (n % 2 != 0) {
    throw StructureError(std::string(what) + " must have even dimension, got " + std::to_string(n));
  }
}

// Index of the first entry that is not negligible relative to the largest one.
Index leading_entry(const Vector& x) {
  const double big = x.cwiseAbs().maxCoeff();
  if (big == 0.0) return -1;
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) > 1e-8 * big) return i;
  }
  return -1;
}

bool leads_negative(const Vector& x) {
  const Index i = leading_entry(x);
  return i >= 0 && x(i) < 0.0;
}

// Real block-Schur form of a skew matrix through the Hermitian matrix iK, for
// the rare inputs on which the real QR iteration stalls. An eigenvector x + iy
// of iK with eigenvalue mu > 0 gives K x = mu y, K y = -mu x.
void hermitian_block_form(const Matrix& K, Matrix& T, Matrix& W) {
  const Index s = K.rows();
  const ComplexMatrix H = std::complex<double>(0.0, 1.0) * K.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(H);
  if (eig.info() != Eigen::Success) throw Error("skew_canonical: eigensolver failed");
  const Vector& lambda = eig.eigenvalues();
  const double cut = static_cast<double>(s) * kEps * std::max(lambda.cwiseAbs().maxCoeff(), kTinyNorm);

  T = Matrix::Zero(s, s);
  W.resize(s, s);
  Index col = 0;
  for (Index i = s - 1; i >= 0 && lambda(i) > cut; --i) {
    const double mu = lambda(i);
    W.col(col) = std::sqrt(2.0) * eig.eigenvectors().col(i).imag();
    W.col(col + 1) = std::sqrt(2.0) * eig.eigenvectors().col(i).real();
    T(col, col + 1) = mu;
    T(col + 1, col) = -mu;
    col += 2;
  }
  if (col < s) {
    Eigen::HouseholderQR<Matrix> qr(W.leftCols(col));
    const Matrix full = qr.householderQ() * Matrix::Identity(s, s);
    W.rightCols(s - col) = full.rightCols(s - col);
  }
}

}  // namespace

double TolerancePolicy::threshold(Index rows, Index cols, double sigma_max) const {
  if (absolute) return *absolute;
  const double dim = static_cast<double>(std::max<Index>({rows, cols, 1}));
  const double relative = sigma_max < kTinyNorm ? kTinyNorm : dim * kEps * sigma_max;
  return scale * std::max(relative, floor);
}

Matrix jmat(Index k) {
  if (k <= 0) throw DimensionError("jmat: half dimension must be positive");
  Matrix J = Matrix::Zero(2 * k, 2 * k);
  J.topRightCorner(k, k).setIdentity();
  J.bottomLeftCorner(k, k) = -Matrix::Identity(k, k);
  return J;
}

namespace {

// Applies -J_{2s} Y J_{2r} to a 2s x 2r matrix Y without forming J.
template <typename M>
M apply_sharp(const M& Y) {
  const Index s = Y.rows() / 2;
  const Index r = Y.cols() / 2;
  // Y J_{2r}: columns become [-Y_right, Y_left].
  M YJ(Y.rows(), Y.cols());
  YJ.leftCols(r) = -Y.rightCols(r);
  YJ.rightCols(r) = Y.leftCols(r);
  // -J_{2s} (YJ): rows become [-(YJ)_bottom, (YJ)_top].
  M out(Y.rows(), Y.cols());
  out.topRows(s) = -YJ.bottomRows(s);
  out.bottomRows(s) = YJ.topRows(s);
  return out;
}

}  // namespace

Matrix sharp_adjoint(const Matrix& X) {
  require_even(X.rows(), "sharp_adjoint: row count");
  require_even(X.cols(), "sharp_adjoint: column count");
  return apply_sharp<Matrix>(X.transpose());
}

ComplexMatrix sharp_adjoint(const ComplexMatrix& X) {
  require_even(X.rows(), "sharp_adjoint: row count");
  require_even(X.cols(), "sharp_adjoint: column count");
  return apply_sharp<ComplexMatrix>(X.adjoint());
}

double symplectic_form(const Vector& u, const Vector& v) {
  require_even(u.size(), "symplectic_form");
  const Index h = u.size() / 2;
  return u.head(h).dot(v.tail(h)) - u.tail(h).dot(v.head(h));
}

SymplecticTest is_symplectic(const Matrix& T, double tol) {
  if (T.rows() != T.cols()) throw StructureError("is_symplectic: matrix is not square");
  require_even(T.rows(), "is_symplectic");
  SymplecticTest out;
  out.residual = (T * sharp_adjoint(T) - Matrix::Identity(T.rows(), T.cols())).norm();
  out.symplectic = out.residual <= tol;
  return out;
}

double orthogonality_residual(const Matrix& Q) {
  return (Q.transpose() * Q - Matrix::Identity(Q.cols(), Q.cols())).norm();
}

void require_finite(const Matrix& M, const char* what) {
  if (!M.allFinite()) {
    throw ValidationError("finite", std::numeric_limits<double>::infinity(),
                          std::string(what) + " contains NaN or infinite entries");
  }
}

// ---------------------------------------------------------------------------
// SubspaceBasis

SubspaceBasis::SubspaceBasis(Matrix basis, double tol) : basis_(std::move(basis)) {
  if (basis_.cols() > 0) {
    const double res = orthogonality_residual(basis_);
    if (res > tol) {
      throw StructureError("SubspaceBasis: columns are not orthonormal (residual " +
                           std::to_string(res) + ")");
    }
  }
}

SubspaceBasis SubspaceBasis::full(Index ambient) {
  return SubspaceBasis(Matrix::Identity(ambient, ambient));
}

SubspaceBasis SubspaceBasis::zero(Index ambient) { return SubspaceBasis(Matrix(ambient, 0)); }

SubspaceBasis SubspaceBasis::span_of(const Matrix& columns, const TolerancePolicy& policy) {
  if (columns.cols() == 0) return zero(columns.rows());
  return numerical_rank(columns, policy).image;
}

SubspaceBasis SubspaceBasis::orthogonal_complement() const {
  const Index n = ambient_dim();
  if (dim() == 0) return full(n);
  Eigen::JacobiSVD<Matrix> svd(basis_, Eigen::ComputeFullU);
  return SubspaceBasis(svd.matrixU().rightCols(n - dim()));
}

double SubspaceBasis::distance(const Vector& v) const {
  if (dim() == 0) return v.norm();
  return (v - basis_ * (basis_.transpose() * v)).norm();
}

// ---------------------------------------------------------------------------
// Rank

RankDecomposition numerical_rank(const Matrix& F, const TolerancePolicy& policy) {
  if (F.rows() == 0 || F.cols() == 0) throw DimensionError("numerical_rank: empty matrix");
  Eigen::JacobiSVD<Matrix> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();

  RankDecomposition out;
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  out.threshold = policy.threshold(F.rows(), F.cols(), smax);
  out.rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > out.threshold) ++out.rank;
  }
  const Index r = out.rank;
  out.image = SubspaceBasis(svd.matrixU().leftCols(r));
  out.coimage = SubspaceBasis(svd.matrixV().leftCols(r));
  out.kernel = SubspaceBasis(svd.matrixV().rightCols(F.cols() - r));
  return out;
}

// ---------------------------------------------------------------------------
// Skew-symmetric canonical form via the real Schur decomposition.

Matrix SkewCanonicalForm::block_form() const {
  const Index s = U.rows();
  Matrix B = Matrix::Zero(s, s);
  for (Index i = 0; i < k; ++i) {
    B(2 * i, 2 * i + 1) = mus[static_cast<size_t>(i)];
    B(2 * i + 1, 2 * i) = -mus[static_cast<size_t>(i)];
  }
  return B;
}

SkewCanonicalForm skew_canonical(const Matrix& M, const TolerancePolicy& policy, double skew_tol) {
  if (M.rows() != M.cols()) throw StructureError("skew_canonical: matrix is not square");
  const Index s = M.rows();
  SkewCanonicalForm out;
  if (s == 0) {
    out.U = Matrix(0, 0);
    return out;
  }
  const double norm = M.norm();
  const double asym = (M + M.transpose()).norm();
  if (asym > skew_tol * std::max(norm, kTinyNorm) && asym > kTinyNorm) {
    throw StructureError("skew_canonical: input is not skew-symmetric (||M + M^T||_F = " +
                         std::to_string(asym) + ")");
  }
  const Matrix K = 0.5 * (M - M.transpose());

  Matrix T, W;
  Eigen::RealSchur<Matrix> schur(K);
  if (schur.info() == Eigen::Success) {
    T = schur.matrixT();
    W = schur.matrixU();
  } else {
    hermitian_block_form(K, T, W);
  }

  struct Pair {
    double mu;
    Index first;  // Schur column of u, used to break ties
    Vector u, v;
  };
  std::vector<Pair> pairs;
  std::vector<Index> singles;
  for (Index i = 0; i < s;) {
    if (i + 1 < s && T(i + 1, i) != 0.0) {
      double mu = 0.5 * (T(i, i + 1) - T(i + 1, i));
      Vector u = W.col(i), v = W.col(i + 1);
      if (mu < 0) {
        mu = -mu;
        std::swap(u, v);
      }
      pairs.push_back({mu, i, std::move(u), std::move(v)});
      i += 2;
    } else {
      singles.push_back(i);
      i += 1;
    }
  }

  double mu_max = 0.0;
  for (const auto& p : pairs) mu_max = std::max(mu_max, p.mu);
  const double tau = policy.threshold(s, s, mu_max);

  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.mu > b.mu; });

  out.U.resize(s, s);
  Index col = 0;
  std::vector<Vector> zero_part;
  for (auto& p : pairs) {
    if (p.mu > tau) {
      if (leads_negative(p.u)) {
        p.u = -p.u;
        p.v = -p.v;
      }
      out.U.col(col++) = p.u;
      out.U.col(col++) = p.v;
      out.mus.push_back(p.mu);
    } else {
      zero_part.push_back(p.u);
      zero_part.push_back(p.v);
    }
  }
  out.k = static_cast<Index>(out.mus.size());
  for (Index i : singles) zero_part.push_back(W.col(i));
  for (auto& z : zero_part) {
    if (leads_negative(z)) z = -z;
    out.U.col(col++) = z;
  }
  return out;
}

SkewCanonicalForm skew_canonical(const Matrix& M, double tol) {
  return skew_canonical(M, TolerancePolicy::fixed(tol * std::max(M.norm(), kTinyNorm)));
}

// ---------------------------------------------------------------------------
// Symplectic basis completion

Matrix symplectic_complete(const Matrix& X, const SubspaceBasis& within, double tol) {
  const Index ambient = within.ambient_dim();
  require_even(ambient, "symplectic_complete: ambient space");
  if (X.rows() != ambient) {
    throw DimensionError("symplectic_complete: vectors have " + std::to_string(X.rows()) +
                         " rows, subspace lives in R^" + std::to_string(ambient));
  }
  require_even(within.dim(), "symplectic_complete: target subspace");
  const Index t = X.cols();
  const Index w = within.dim() / 2;
  if (t > w) throw DimensionError("symplectic_complete: more isotropic vectors than half the subspace");
  const Matrix& N = within.basis();

  for (Index i = 0; i < t; ++i) {
    const double nx = X.col(i).norm();
    if (within.distance(X.col(i)) > tol * std::max(nx, 1.0)) {
      throw StructureError("symplectic_complete: vector " + std::to_string(i) +
                           " does not lie in the target subspace");
    }
    for (Index j = 0; j < i; ++j) {
      const double om = symplectic_form(X.col(i), X.col(j));
      if (std::abs(om) > tol * std::max(nx * X.col(j).norm(), 1.0)) {
        throw StructureError("symplectic_complete: vectors " + std::to_string(j) + " and " +
                             std::to_string(i) + " are not isotropic");
      }
    }
  }

  // Partner coefficients: rows of Apair = X^T J N must be independent.
  Matrix JN(ambient, N.cols());
  const Index h = ambient / 2;
  JN.topRows(h) = N.bottomRows(h);
  JN.bottomRows(h) = -N.topRows(h);
  const Matrix Apair = X.transpose() * JN;
  {
    Matrix accepted(N.cols(), 0);
    for (Index i = 0; i < t; ++i) {
      Vector a = Apair.row(i).transpose();
      Vector res = a;
      if (accepted.cols() > 0) {
        res -= accepted * (accepted.transpose() * a);
        res -= accepted * (accepted.transpose() * res);
      }
      if (res.norm() <= tol * std::max(X.col(i).norm(), 1e-300)) {
        throw DegeneracyError(i, "symplectic_complete: vector " + std::to_string(i) +
                                     " has no symplectic partner in the target subspace");
      }
      accepted.conservativeResize(Eigen::NoChange, accepted.cols() + 1);
      accepted.col(accepted.cols() - 1) = res.normalized();
    }
  }

  Matrix P(ambient, t);
  if (t > 0) {
    const Matrix coeff = Apair.completeOrthogonalDecomposition().solve(Matrix::Identity(t, t));
    P = N * coeff;
    Matrix Omega(t, t);
    for (Index i = 0; i < t; ++i)
      for (Index j = 0; j < t; ++j) Omega(i, j) = symplectic_form(P.col(i), P.col(j));
    P += 0.5 * X * Omega;
  }

  // Complete inside the omega-complement of span{X, P} within the subspace.
  const Index c = w - t;
  Matrix completion_q(ambient, c), completion_p(ambient, c);
  if (c > 0) {
    Matrix B;
    if (t > 0) {
      Matrix S(ambient, 2 * t);
      S << X, P;
      const Matrix constraint = S.transpose() * JN;
      const auto rd = numerical_rank(constraint);
      if (rd.rank != 2 * t) {
        throw DegeneracyError(t, "symplectic_complete: paired vectors are numerically dependent");
      }
      B = N * rd.kernel.basis();
    } else {
      B = N;
    }
    Matrix G(B.cols(), B.cols());
    {
      Matrix JB(ambient, B.cols());
      JB.topRows(h) = B.bottomRows(h);
      JB.bottomRows(h) = -B.topRows(h);
      G = B.transpose() * JB;
    }
    const auto form = skew_canonical(G, tol);
    if (form.k != c) {
      throw DegeneracyError(t + form.k, "symplectic_complete: the symplectic form is degenerate on "
                                        "the remaining subspace");
    }
    for (Index i = 0; i < c; ++i) {
      const double root = std::sqrt(form.mus[static_cast<size_t>(i)]);
      completion_q.col(i) = B * form.u(i) / root;
      completion_p.col(i) = B * form.v(i) / root;
    }
  }

  Matrix T(ambient, 2 * w);
  T << X, completion_q, P, completion_p;
  return T;
}

Matrix symplectic_complete(const Matrix& X, double tol) {
  return symplectic_complete(X, SubspaceBasis::full(X.rows()), tol);
}

// ---------------------------------------------------------------------------
// Principal angles (cosines and sines combined for accuracy at both ends).

std::vector<double> principal_angles(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw StructureError("principal_angles: ambient dimensions differ (" +
                         std::to_string(a.ambient_dim()) + " vs " + std::to_string(b.ambient_dim()) +
                         ")");
  }
  const SubspaceBasis& big = a.dim() >= b.dim() ? a : b;
  const SubspaceBasis& small = a.dim() >= b.dim() ? b : a;
  const Index q = small.dim();
  std::vector<double> angles;
  if (q == 0) return angles;

  const Matrix cross = big.basis().transpose() * small.basis();
  Eigen::JacobiSVD<Matrix> cs(cross);
  const Matrix residual = small.basis() - big.basis() * cross;
  Eigen::JacobiSVD<Matrix> sn(residual);
  Vector cosines = cs.singularValues();                // descending
  Vector sines = sn.singularValues().reverse().eval();  // ascending
  angles.reserve(static_cast<size_t>(q));
  for (Index i = 0; i < q; ++i) {
    const double c = std::min(1.0, cosines(i));
    const double s = std::min(1.0, sines(i));
    // Use whichever of asin/acos is well conditioned.
    angles.push_back(c > std::sqrt(0.5) ? std::asin(s) : std::acos(c));
  }
  return angles;
}

double subspace_distance(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.dim() != b.dim()) return std::acos(0.0);
  const auto angles = principal_angles(a, b);
  return angles.empty() ? 0.0 : *std::max_element(angles.begin(), angles.end());
}

}  // namespace lqss
