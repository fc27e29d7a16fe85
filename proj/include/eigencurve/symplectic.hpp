#pragma once
#include <cstddef>

#include "eigencurve/matrix.hpp"

namespace eigencurve {

// Boundary phase space C^{2d} with the pairing omega(f, g) = <f2, g1> -
// <f1, g2>, where f = (f1; f2) stacks the two d-blocks and <.,.> is the
// Euclidean pairing linear in its first slot. omega(f, g) = <J f, g> with
// the block matrix J = [[0, I], [-I, 0]].
ComplexMatrix symplectic_J(std::size_t d);
Complex omega(const ComplexMatrix& f, const ComplexMatrix& g);

// Diagnostics for a candidate boundary condition ker [X Y].
struct LagrangianReport {
  double symmetry_defect = 0.0;  // ||X Y^dagger - Y X^dagger||_F
  double frame_floor = 0.0;      // smallest eigenvalue of Z Z^dagger
  bool self_adjoint = false;
  bool nondegenerate = false;
  bool ok() const { return self_adjoint && nondegenerate; }
};

LagrangianReport check_lagrangian(const ComplexMatrix& x, const ComplexMatrix& y);

// A maximal-isotropic (Lagrangian) plane presented as ker [X Y] together
// with the orthogonal projection Q onto it. The projection is the
// coordinate-free face of the condition: two block presentations of the same
// plane produce the same Q.
struct LagrangianPlane {
  std::size_t d = 0;
  ComplexMatrix X;  // d x d
  ComplexMatrix Y;  // d x d
  ComplexMatrix Z;  // [X Y], d x 2d
  ComplexMatrix Q;  // 2d x 2d, Q = Q^dagger = Q^2, Z Q = 0, rank d
  double symmetry_defect = 0.0;
  double frame_floor = 0.0;
};

// Throws NotSelfAdjointCondition / DegenerateCondition on invalid blocks.
LagrangianPlane make_plane(ComplexMatrix x, ComplexMatrix y);

// The condition theta * f1 - f2 = 0 for Hermitian theta (X = theta, Y = -I).
LagrangianPlane robin_plane(const ComplexMatrix& theta);

// Operator-norm distance between the projections of two planes; lies in
// [0, 1] and vanishes exactly when the planes coincide.
double plane_distance(const LagrangianPlane& a, const LagrangianPlane& b);

// First and second t-derivatives of the projection t -> Q(t) of a plane
// family Z(t), evaluated from the value and derivatives of Z at one point.
struct QDerivatives {
  ComplexMatrix Qdot;
  ComplexMatrix Qddot;
};

QDerivatives q_derivatives(const LagrangianPlane& p, const ComplexMatrix& Zdot,
                           const ComplexMatrix& Zddot);

}  // namespace eigencurve
