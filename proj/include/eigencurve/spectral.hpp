#pragma once
#include <cstddef>
#include <vector>

#include "eigencurve/discretization.hpp"
#include "eigencurve/matrix.hpp"

namespace eigencurve {

// An isolated group of eigenvalues of an assembled operator: the cluster of
// eigenvalues chained together within cluster_tol * scale of each other,
// its mean, the spectral projection onto the group, and the reduced
// resolvent at the mean, which inverts (A - lambda) on the complement.
struct LambdaGroup {
  double lambda = 0.0;               // mean of the clustered eigenvalues
  std::vector<std::size_t> indices;  // positions in the ascending eigenvalue list
  std::size_t m = 0;                 // multiplicity of the group
  double radius = 0.0;               // half the distance to the rest of the spectrum
  ComplexMatrix P;                   // projection, rank m
  ComplexMatrix S;                   // reduced resolvent, P S = S P = 0
  ComplexMatrix U;                   // orthonormal columns spanning range(P)
};

// Group containing the eigenvalue closest to the query value, or the one at
// a given position in the ascending list. Throws NotIsolated when the
// cluster is not cleanly separated from the rest of the spectrum.
LambdaGroup lambda_group(const ExtensionOperator& op, double query, double cluster_tol);
LambdaGroup lambda_group_by_index(const ExtensionOperator& op, std::size_t index,
                                  double cluster_tol);

// Resolvent (A - zeta)^{-1} from the eigendecomposition. Throws
// SpectralPointHit when zeta is numerically on the spectrum.
ComplexMatrix resolvent(const ExtensionOperator& op, Complex zeta);

// Same operator computed by direct elimination, kept as an independent
// route for cross-checks.
ComplexMatrix resolvent_via_solve(const ExtensionOperator& op, Complex zeta);

// Compression of an interior operator to the boundary data space:
// (1/h) * (T E) M (T E)^dagger. The 1/h is the weighted adjoint of T E
// between the h-weighted interior space and the unweighted boundary space.
ComplexMatrix boundary_compression(const ExtensionOperator& op, const ComplexMatrix& m);

// Contour-integral versions of P and S on a circle of radius group.radius
// around group.lambda, evaluated with the elimination-based resolvent on an
// equispaced rule. Independent of the eigendecomposition route, so they
// serve as oracles for it.
ComplexMatrix contour_projection(const ExtensionOperator& op, const LambdaGroup& group,
                                 std::size_t points = 64);
ComplexMatrix contour_reduced_resolvent(const ExtensionOperator& op, const LambdaGroup& group,
                                        std::size_t points = 64);

}  // namespace eigencurve
