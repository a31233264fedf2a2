#pragma once

// Three-mode optomechanical example: two mechanical modes (1, 2) coupled to an
// optical mode (3) that leaks into a single field,
//
//   H = (w/2)(q3^2 + p3^2) + lambda q1 q3 + lambda q2 q3,
//   L = (gamma/sqrt(2)) (q3 + i p3),  S = 1.
//
// H = 1/2 x^T R x expands to R[q3,q3] = R[p3,p3] = w and
// R[q1,q3] = R[q3,q1] = R[q2,q3] = R[q3,q2] = lambda.

#include "lqss/kalman.hpp"
#include "lqss/model.hpp"

namespace lqss {

struct OptomechanicalParams {
  double omega = 1.0;
  double lambda = 1.0;
  double gamma = 1.0;

  /// Throws ValidationError unless all three are finite and positive.
  void validate() const;
};

PhysicalSpec optomechanical_physical(const OptomechanicalParams& p);
Matrix optomechanical_hamiltonian(const OptomechanicalParams& p);
QuadratureSystem optomechanical_system(const OptomechanicalParams& p);

/// a = w (w^8 + w^6 + w^4 + w^2 + 1) / (w^10 + w^8 + ... + 1).
double coefficient_a(double omega);
/// b = 1 / (w^10 + w^8 + ... + 1).
double coefficient_b(double omega);

/// The hand-derived Kalman transformation V for this system (rows are
/// q^1, q^2, q^3, p^1, p^2, p^3 over q1, q2, q3, p1, p2, p3).
Matrix optomechanical_reference_transform(const OptomechanicalParams& p);

/// (X, Y) turning the reference V into an orthogonal symplectic V' = Y^-1 V.
RefinementPair optomechanical_reference_refinement(const OptomechanicalParams& p);

}  // namespace lqss
