#include "lqss/optomechanical.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lqss {

namespace {

// 1 + w^2 + ... + w^(2 top)
double even_powers(double omega, int top) {
  double sum = 0.0, term = 1.0;
  for (int j = 0; j <= top; ++j) {
    sum += term;
    term *= omega * omega;
  }
  return sum;
}

}  // namespace

void OptomechanicalParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw ValidationError(std::string(name) + " positive", v,
                            std::string(name) + " must be finite and positive, got " + std::to_string(v));
    }
  };
  check(omega, "omega");
  check(lambda, "lambda");
  check(gamma, "gamma");
}

PhysicalSpec optomechanical_physical(const OptomechanicalParams& p) {
  p.validate();
  PhysicalSpec spec;
  spec.S = ComplexMatrix::Identity(1, 1);
  spec.Lq = ComplexMatrix::Zero(1, 3);
  spec.Lp = ComplexMatrix::Zero(1, 3);
  spec.Lq(0, 2) = p.gamma / std::sqrt(2.0);
  spec.Lp(0, 2) = std::complex<double>(0.0, p.gamma / std::sqrt(2.0));
  return spec;
}

Matrix optomechanical_hamiltonian(const OptomechanicalParams& p) {
  p.validate();
  Matrix R = Matrix::Zero(6, 6);
  R(2, 2) = p.omega;
  R(5, 5) = p.omega;
  R(0, 2) = R(2, 0) = p.lambda;
  R(1, 2) = R(2, 1) = p.lambda;
  return R;
}

QuadratureSystem optomechanical_system(const OptomechanicalParams& p) {
  const CouplingData coupling = from_physical(optomechanical_physical(p));
  return QuadratureSystem::build(optomechanical_hamiltonian(p), coupling.C, coupling.Sigma);
}

double coefficient_a(double omega) { return omega * even_powers(omega, 4) / even_powers(omega, 5); }

double coefficient_b(double omega) { return 1.0 / even_powers(omega, 5); }

Matrix optomechanical_reference_transform(const OptomechanicalParams& p) {
  p.validate();
  const double la = p.lambda * coefficient_a(p.omega);
  const double h = 1.0 / std::sqrt(2.0);
  Matrix V(6, 6);
  V << 0, 0, 0, 0, 0, 1,
      -1, -1, 0, 0, 0, 0,
      h, -h, 0, 0, 0, 0,
      -la, -la, -1, 0, 0, 0,
      0, 0, 0, -0.5, -0.5, la,
      0, 0, 0, h, -h, 0;
  return V;
}

RefinementPair optomechanical_reference_refinement(const OptomechanicalParams& p) {
  p.validate();
  const double a = coefficient_a(p.omega);
  const double b = coefficient_b(p.omega);
  const double la = p.lambda * a;
  const double s2 = std::sqrt(2.0);

  RefinementPair pair;
  pair.X = Matrix::Identity(12, 12);
  pair.X.topLeftCorner(3, 3) << 0, -p.lambda * p.gamma * a / std::sqrt(b), 1,
      0, 1, 0,
      1, 0, 0;
  pair.Y.resize(6, 6);
  pair.Y << 0, 0, 0, 1, 0, 0,
      0, -s2, 0, 0, 0, 0,
      0, 0, 1, 0, 0, 0,
      -1, -s2 * la, 0, 0, 0, 0,
      0, 0, 0, la, -1 / s2, 0,
      0, 0, 0, 0, 0, 1;
  return pair;
}

}  // namespace lqss
