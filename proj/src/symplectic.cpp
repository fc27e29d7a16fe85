#include "eigencurve/symplectic.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "eigencurve/errors.hpp"
#include "eigencurve/numerics.hpp"

namespace eigencurve {

ComplexMatrix symplectic_J(std::size_t d) {
  ComplexMatrix j(2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    j(i, d + i) = Complex(1.0, 0.0);
    j(d + i, i) = Complex(-1.0, 0.0);
  }
  return j;
}

Complex omega(const ComplexMatrix& f, const ComplexMatrix& g) {
  if (f.cols() != 1 || g.cols() != 1 || f.rows() != g.rows() || f.rows() % 2 != 0)
    throw DimensionMismatch("omega: expects two stacked vectors of equal even length");
  const std::size_t d = f.rows() / 2;
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    acc += f(d + i, 0) * std::conj(g(i, 0));
    acc -= f(i, 0) * std::conj(g(d + i, 0));
  }
  return acc;
}

LagrangianReport check_lagrangian(const ComplexMatrix& x, const ComplexMatrix& y) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
    throw DimensionMismatch("check_lagrangian: X and Y must be square of equal size");
  const ComplexMatrix z = hstack(x, y);
  const double scale = std::max(1.0, z.frobenius_norm() * z.frobenius_norm());
  const ComplexMatrix s = x * y.adjoint() - y * x.adjoint();
  LagrangianReport rep;
  rep.symmetry_defect = s.frobenius_norm();
  rep.self_adjoint = rep.symmetry_defect <= 1e-10 * scale;
  const ComplexMatrix gram = z * z.adjoint();
  const Eigensystem es = hermitian_eig(certify_hermitian(gram, 1e-8));
  rep.frame_floor = es.values.empty() ? 0.0 : std::max(0.0, es.values.front());
  rep.nondegenerate = rep.frame_floor > 1e-10;
  return rep;
}

LagrangianPlane make_plane(ComplexMatrix x, ComplexMatrix y) {
  LagrangianReport rep = check_lagrangian(x, y);
  if (!rep.self_adjoint)
    throw NotSelfAdjointCondition("make_plane: X Y^dagger is not Hermitian, defect " +
                                  std::to_string(rep.symmetry_defect));
  if (!rep.nondegenerate)
    throw DegenerateCondition("make_plane: [X Y] is rank deficient, frame floor " +
                              std::to_string(rep.frame_floor));
  LagrangianPlane p;
  p.d = x.rows();
  p.Z = hstack(x, y);
  p.X = std::move(x);
  p.Y = std::move(y);
  p.symmetry_defect = rep.symmetry_defect;
  p.frame_floor = rep.frame_floor;

  // Q = -J Z^dagger (Z Z^dagger)^{-1} Z J projects onto ker Z.
  const ComplexMatrix j = symplectic_J(p.d);
  const ComplexMatrix gram = p.Z * p.Z.adjoint();
  const ComplexMatrix w = solve(gram, p.Z * j);
  ComplexMatrix q = -(j * p.Z.adjoint()) * w;
  p.Q = 0.5 * (q + q.adjoint());
  return p;
}

LagrangianPlane robin_plane(const ComplexMatrix& theta) {
  if (theta.rows() != theta.cols()) throw DimensionMismatch("robin_plane: theta must be square");
  return make_plane(theta, -ComplexMatrix::identity(theta.rows()));
}

double plane_distance(const LagrangianPlane& a, const LagrangianPlane& b) {
  if (a.d != b.d) throw DimensionMismatch("plane_distance: planes live in different spaces");
  return operator_norm_hermitian(a.Q - b.Q);
}

QDerivatives q_derivatives(const LagrangianPlane& p, const ComplexMatrix& Zdot,
                           const ComplexMatrix& Zddot) {
  const std::size_t d = p.d;
  if (Zdot.rows() != d || Zdot.cols() != 2 * d || Zddot.rows() != d || Zddot.cols() != 2 * d)
    throw DimensionMismatch("q_derivatives: derivative blocks must be d x 2d");
  const ComplexMatrix& z = p.Z;
  const ComplexMatrix gram = z * z.adjoint();
  const ComplexMatrix beta = solve(gram, ComplexMatrix::identity(d));
  const ComplexMatrix gdot = Zdot * z.adjoint() + z * Zdot.adjoint();
  const ComplexMatrix gddot = Zddot * z.adjoint() + 2.0 * (Zdot * Zdot.adjoint()) + z * Zddot.adjoint();
  const ComplexMatrix beta_dot = -1.0 * (beta * gdot * beta);
  const ComplexMatrix beta_ddot =
      -1.0 * (beta_dot * gdot * beta) - beta * gddot * beta - beta * gdot * beta_dot;

  const ComplexMatrix j = symplectic_J(d);
  const ComplexMatrix g1 = Zdot.adjoint() * beta * z + z.adjoint() * beta_dot * z +
                           z.adjoint() * beta * Zdot;
  const ComplexMatrix g2 = Zddot.adjoint() * beta * z + z.adjoint() * beta * Zddot +
                           2.0 * (Zdot.adjoint() * beta * Zdot) +
                           2.0 * (Zdot.adjoint() * beta_dot * z) +
                           2.0 * (z.adjoint() * beta_dot * Zdot) + z.adjoint() * beta_ddot * z;
  QDerivatives out;
  out.Qdot = -1.0 * (j * g1 * j);
  out.Qddot = -1.0 * (j * g2 * j);
  return out;
}

}  // namespace eigencurve
