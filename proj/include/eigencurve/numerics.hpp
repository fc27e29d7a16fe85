#pragma once
#include <vector>

#include "eigencurve/matrix.hpp"

namespace eigencurve {

// Witness that a matrix is Hermitian up to a relative defect. Downstream
// spectral routines only accept certified inputs, which keeps "accidentally
// non-symmetric" failure modes at the door instead of deep inside an
// eigensolver.
struct HermitianCertificate {
  ComplexMatrix matrix;
  double defect = 0.0;  // ||M - M^dagger||_F / max(1, ||M||_F)
};

// Throws SelfAdjointnessDefect when the relative asymmetry exceeds tol.
HermitianCertificate certify_hermitian(ComplexMatrix m, double tol = 1e-10);

struct Eigensystem {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // orthonormal columns, column k pairs with values[k]
  double scale() const;        // max(1, max |values|)
};

// Cyclic Jacobi diagonalization of a Hermitian matrix. Deterministic:
// a fixed pivot order and a fixed convergence schedule, so repeated runs
// produce bit-identical output. Eigenvector columns have their largest
// entry rotated to the positive real axis.
Eigensystem hermitian_eig(const HermitianCertificate& m);

// Gaussian elimination with partial pivoting; rhs may have many columns.
ComplexMatrix solve(const ComplexMatrix& m, const ComplexMatrix& rhs);

// Adjoint between uniformly weighted inner-product spaces. For
// M : (C^cols, col_weight * <.,.>) -> (C^rows, row_weight * <.,.>)
// returns the unique A with <M x, y>_row = <x, A y>_col for all x, y,
// which is A = (row_weight / col_weight) * M^dagger. The pairing identity
// is the contract; it is what the tests pin down.
ComplexMatrix weighted_adjoint(const ComplexMatrix& m, double row_weight, double col_weight);

double operator_norm(const ComplexMatrix& m);            // largest singular value
double operator_norm_hermitian(const ComplexMatrix& m);  // max |eigenvalue|
double smallest_singular_value(const ComplexMatrix& m);

// Rayleigh quotient <A v, v> / <v, v> with the quadratic form accumulated in
// double-double arithmetic. Used to refine eigenvalues whose magnitude sits
// far below ||A||, where a plain dot product would lose them to cancellation.
double rayleigh_quotient_refined(const ComplexMatrix& a, const ComplexMatrix& v);

}  // namespace eigencurve
