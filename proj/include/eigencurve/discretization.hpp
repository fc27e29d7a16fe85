#pragma once
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "eigencurve/matrix.hpp"
#include "eigencurve/numerics.hpp"
#include "eigencurve/symplectic.hpp"

namespace eigencurve {

// Matrix-valued potential on an interval, evaluated at grid nodes. Every
// coefficient or sample must be an n x n Hermitian matrix.
struct PotentialSpec {
  enum class Kind { kZero, kConstant, kPolynomial, kSamples };
  Kind kind = Kind::kZero;
  std::size_t n = 1;
  // constant: {V}; polynomial: {c0, c1, ...} meaning sum_k x^k c_k;
  // samples: one value per grid node x_0..x_N.
  std::vector<ComplexMatrix> data;

  static PotentialSpec zero(std::size_t n);
  static PotentialSpec constant(ComplexMatrix v);
  static PotentialSpec polynomial(std::vector<ComplexMatrix> coeffs);
  static PotentialSpec samples(std::vector<ComplexMatrix> node_values);

  // Value at node j of an N-step grid on [a, b]. Throws BadPotential when
  // shapes, Hermiticity, or sample counts do not line up.
  ComplexMatrix at_node(double a, double b, std::size_t N, std::size_t j) const;
};

// Uniform-grid model of -u'' + V u on [a, b] with n internal components.
// State vectors list node values u_0..u_N (full, dimension (N+1)n); the
// working Hilbert space keeps only the interior nodes u_1..u_{N-1} with
// inner product h * sum_j <u_j, v_j>. The maximal operator acts on full
// vectors and returns interior ones; the boundary map T stacks the node
// values at the two ends on top of the one-sided difference quotients
// pointing inward. With these choices the abstract integration-by-parts
// identity holds exactly, not up to discretization error:
//   <Astar u, v> - <u, Astar v> = omega(T u, T v)  for all full u, v.
struct DiscreteTriplet {
  double a = 0.0;
  double b = 1.0;
  double h = 0.0;
  std::size_t n = 1;
  std::size_t N = 0;
  ComplexMatrix Astar;                 // (N-1)n x (N+1)n
  ComplexMatrix T;                     // 4n x (N+1)n, rows = (Gamma0; Gamma1)
  std::vector<ComplexMatrix> v_nodes;  // potential at x_1..x_{N-1}
  std::vector<std::string> warnings;

  std::size_t d() const { return 2 * n; }
  std::size_t interior_dim() const { return (N - 1) * n; }
  std::size_t full_dim() const { return (N + 1) * n; }
};

DiscreteTriplet build_triplet(double a, double b, std::size_t n, std::size_t N,
                              const PotentialSpec& pot);

// Drop the two endpoint blocks of a full vector (or of each column).
ComplexMatrix restrict_interior(const DiscreteTriplet& t, const ComplexMatrix& full);

// Defect of the integration-by-parts identity for one pair of full vectors,
// together with the natural size of the three terms entering it.
struct GreenCheck {
  double defect = 0.0;
  double scale = 0.0;
};
GreenCheck green_defect(const DiscreteTriplet& t, const ComplexMatrix& u, const ComplexMatrix& v);

// Block-diagonal multiplication operator on the interior space.
ComplexMatrix multiplication_operator(const DiscreteTriplet& t, const PotentialSpec& p);

// Solving the boundary condition X Gamma0 u + Y Gamma1 u = 0 for the
// endpoint values turns a condition into a linear extension map E from
// interior data to full vectors: endpoints become (u_0; u_N) =
// G (u_1; u_{N-1}). The elimination matrix is B = X - Y / h; a (nearly)
// singular B means the condition cannot determine the endpoints on this
// grid and raises BoundaryResonance.
struct GhostExtension {
  ComplexMatrix E;  // (N+1)n x (N-1)n
  ComplexMatrix G;  // 2n x 2n
  double b_floor = 0.0;  // smallest singular value of B, for diagnostics
};
GhostExtension ghost_extension(const DiscreteTriplet& t, const LagrangianPlane& plane);

// The self-adjoint realization picked out by a plane: the interior matrix
// Astar * E, certified Hermitian, plus everything downstream consumers need
// (extension map, boundary trace of the extension, eigendecomposition).
struct ExtensionOperator {
  std::shared_ptr<const DiscreteTriplet> triplet;
  LagrangianPlane plane;
  HermitianCertificate op;  // interior realization, (N-1)n square
  ComplexMatrix E;          // (N+1)n x (N-1)n
  ComplexMatrix TE;         // 4n x (N-1)n, boundary trace composed with E
  Eigensystem eig;

  double h() const { return triplet->h; }
  std::size_t dim() const { return triplet->interior_dim(); }
};

ExtensionOperator assemble_operator(std::shared_ptr<const DiscreteTriplet> t,
                                    const LagrangianPlane& plane);

// Same, plus a Hermitian interior term added to the realization (an extra
// multiplication operator on the interior space).
ExtensionOperator assemble_operator(std::shared_ptr<const DiscreteTriplet> t,
                                    const LagrangianPlane& plane,
                                    const ComplexMatrix& interior_term);

}  // namespace eigencurve
