#pragma once
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "eigencurve/discretization.hpp"
#include "eigencurve/matrix.hpp"
#include "eigencurve/spectral.hpp"
#include "eigencurve/symplectic.hpp"

namespace eigencurve {

// Matrix-valued polynomial in one real parameter, c0 + t c1 + t^2 c2 + ...
struct MatrixPolynomial {
  std::vector<ComplexMatrix> coeffs;

  ComplexMatrix eval(double t) const;
  ComplexMatrix deriv1(double t) const;
  ComplexMatrix deriv2(double t) const;
  std::size_t dim() const { return coeffs.empty() ? 0 : coeffs.front().rows(); }

  // Exact polynomial through the given nodes (divided differences expanded
  // to monomial coefficients). Degree = node count - 1.
  static MatrixPolynomial interpolate(const std::vector<double>& ts,
                                      const std::vector<ComplexMatrix>& values);
};

// Value and first two derivatives of the condition blocks Z(t) = [X(t) Y(t)]
// at one parameter value.
struct ZData {
  ComplexMatrix Z;
  ComplexMatrix Zdot;
  ComplexMatrix Zddot;
};

// One-parameter family of boundary conditions, optionally combined with a
// parameter-dependent additive potential sum_k t^k V_k. Presentations:
//  - robin: X(t) = theta(t) with Hermitian theta, Y = -I;
//  - general: arbitrary polynomial blocks X(t), Y(t);
//  - sampled: theta tabulated on parameter nodes, interpolated exactly.
class BoundaryFamily {
 public:
  enum class Kind { kRobin, kGeneral, kSampled };

  static BoundaryFamily robin(MatrixPolynomial theta);
  static BoundaryFamily general(MatrixPolynomial x, MatrixPolynomial y);
  static BoundaryFamily sampled_robin(const std::vector<double>& ts,
                                      const std::vector<ComplexMatrix>& thetas);

  Kind kind() const { return kind_; }
  std::size_t d() const { return d_; }
  bool has_additive() const { return !additive_.empty(); }
  bool robin_presented() const { return kind_ != Kind::kGeneral; }

  // Additive part: V(t) = sum_k t^k V_k with each V_k a potential spec.
  void set_additive(std::vector<PotentialSpec> coeffs);
  const std::vector<PotentialSpec>& additive() const { return additive_; }

  // Restrict the family to a parameter window; evaluation outside throws.
  void set_window(double lo, double hi);

  ZData z_at(double t) const;
  LagrangianPlane plane_at(double t) const;
  ComplexMatrix theta_at(double t) const;     // robin presentations only
  ComplexMatrix theta_deriv1(double t) const; // robin presentations only
  ComplexMatrix theta_deriv2(double t) const; // robin presentations only

  // Additive multiplication operators on the interior space of a grid:
  // value, d/dt, d^2/dt^2 at t. Empty matrices when there is no additive part.
  ComplexMatrix additive_term(const DiscreteTriplet& trip, double t) const;
  ComplexMatrix additive_deriv1(const DiscreteTriplet& trip, double t) const;
  ComplexMatrix additive_deriv2(const DiscreteTriplet& trip, double t) const;

 private:
  void check_window(double t) const;

  Kind kind_ = Kind::kRobin;
  std::size_t d_ = 0;
  MatrixPolynomial theta_;
  MatrixPolynomial x_, y_;
  std::vector<PotentialSpec> additive_;
  double window_lo_, window_hi_;
};

// The self-adjoint operator of the family at parameter t: boundary
// realization plus the additive term.
ExtensionOperator operator_at(std::shared_ptr<const DiscreteTriplet> trip,
                              const BoundaryFamily& fam, double t);

// Difference-of-resolvents factorization through the boundary space. For
// operators of two planes on one grid and a shift off both spectra,
//   R_t(z) - R_0(z) = (1/h) [T_t R_t(conj z)]^dagger (Q_t - Q_0) J Q_0 T_0 R_0(z)
// holds exactly on this model. Returns the residual of that identity and
// the size of the left side.
struct KreinCheck {
  double defect = 0.0;
  double scale = 0.0;
};
KreinCheck krein_check(const ExtensionOperator& at_t, const ExtensionOperator& at_t0,
                       Complex zeta);

// Parameter derivative of the boundary trace of the extension map. The
// endpoint elimination moves with the condition blocks, so the trace of a
// differentiated extension is not T E times an interior derivative: it picks
// up the derivative of the elimination itself. This matrix carries that
// contribution; it vanishes for a constant family. Differentiating
// Q_t T E_t = T E_t shows (1 - Q) (T Edot) = Qdot T E, which pins its
// projection off ran Q; the Q-part comes from the elimination blocks.
ComplexMatrix lift_trace_derivative(const ExtensionOperator& op, const ZData& zd);

// First and second parameter derivatives of the resolvent at a real shift,
// for a pure boundary family (no additive part). te_dot is the
// lift_trace_derivative of the family at the base point; it enters the
// second derivative through the mixed coupling
// (1/h) (T E)^dagger Qdot J (T Edot), which is Hermitian on this model.
struct ResolventDerivatives {
  ComplexMatrix Rdot;
  ComplexMatrix Rddot;
};
ResolventDerivatives resolvent_derivatives(const ExtensionOperator& op, const QDerivatives& qd,
                                           const ComplexMatrix& te_dot, double zeta);

// First and second parameter derivatives of the spectral projection of an
// isolated group, for a pure boundary family.
struct ProjectionDerivatives {
  ComplexMatrix Pdot;
  ComplexMatrix Pddot;
};
ProjectionDerivatives projection_derivatives(const ExtensionOperator& op, const LambdaGroup& group,
                                             const QDerivatives& qd, const ComplexMatrix& te_dot);

// Compressed representatives of the reduced eigenvalue function on the
// group: value (diagonal eigenvalues), first derivative, second derivative,
// all m x m in the orthonormal basis group.U.
struct CompressedW {
  ComplexMatrix W0;
  ComplexMatrix W1;
  ComplexMatrix W2;
};
CompressedW w_compressed(const ExtensionOperator& op, const LambdaGroup& group,
                         const QDerivatives& qd, const ComplexMatrix& te_dot,
                         const ComplexMatrix& vdot, const ComplexMatrix& vddot);

// Direct evaluation of the reduced eigenvalue function at a neighboring
// parameter: conjugate the group of at_t back to the base group's basis with
// the canonical transformation built from the two projections. Throws
// UnitaryBreakdown when the projections are too far apart.
ComplexMatrix w_direct(const ExtensionOperator& at_t, const ExtensionOperator& at_t0,
                       const LambdaGroup& group0, double cluster_tol);

// One branch of the eigenvalue expansion at a group: lambda(t) =
// lambda + (t - t0) c1 + (t - t0)^2 c2 + O((t - t0)^3).
struct ExpansionBranch {
  std::size_t group_index = 0;   // which c1-cluster this branch belongs to
  std::size_t branch_index = 0;  // position inside that cluster
  double mu = 0.0;               // first-order coefficient
  double nu = 0.0;               // second-order reduced eigenvalue (2 c2)
  double c1 = 0.0;
  double c2 = 0.0;
  ComplexMatrix u;    // interior representative, normalized in the h-metric
  ComplexMatrix phi;  // boundary representative
};

struct ExpansionResult {
  double t0 = 0.0;
  double lambda = 0.0;
  std::size_t m = 0;                       // group multiplicity
  std::size_t m_prime = 0;                 // number of distinct slopes
  std::vector<std::size_t> group_sizes;    // multiplicity of each slope
  std::vector<ExpansionBranch> branches;   // sorted by (mu, nu)
  std::string formula_used;                // "projection", "robin" or "additive"
  double cross_check_defect = 0.0;         // worst disagreement between routes
  ComplexMatrix What1;                     // m x m first-order matrix
  ComplexMatrix What2;                     // m x m second-order matrix
};

struct ExpansionTols {
  double cluster_tol = 1e-8;      // eigenvalue chaining, relative to spectrum scale
  double cluster_tol_mu = 1e-6;   // slope chaining, relative to max(1, |mu|)
  double formula_mismatch = 1e-8; // cross-route gate, relative to max(1, |value|)
};

// The expansion engine: selection of branches through the compressed
// first- and second-order matrices, with every branch cross-checked against
// the independent condition-block route (and the theta route for robin
// presentations). Throws FormulaMismatch when the routes disagree.
ExpansionResult expand_eigencurves(const ExtensionOperator& op0, const BoundaryFamily& fam,
                                   double t0, const LambdaGroup& group,
                                   const ExpansionTols& tols = {});

// Coefficients for one representative from the condition blocks:
//   phi = (Z Z^dagger)^{-1} Z J T u,
//   c1 = <Z J Zdot^dagger phi, phi>,
//   c2 = (1/2)(<Z J Zddot^dagger phi, phi> - 2 s),
// where s compresses the reduced resolvent against Zdot^dagger phi. The
// sandwich through B_S alone misses the motion of the endpoint elimination;
// the full term is
//   s = <B_S Zdot^dagger phi, Zdot^dagger phi>
//       + <T Edot u, Qdot J T u> + omega(Q Zdot^dagger phi, Zdot^dagger phi),
// which restores agreement with the tracked curves on this model.
std::pair<double, double> z_form_coefficients(const ExtensionOperator& op, const ZData& zd,
                                              const QDerivatives& qd, const ComplexMatrix& bs,
                                              const ComplexMatrix& te_dot, const ComplexMatrix& u);

// Same for a robin presentation, via the boundary value trace:
//   c1 = <thetadot g0, g0>,
//   c2 = (1/2)(<thetaddot g0, g0> - 2 s),
//   s  = <thetadot Gs thetadot g0, g0> + the same two correction terms,
// with g0 the endpoint-value block of T u and Gs the endpoint-value block
// of the boundary compression of S.
std::pair<double, double> robin_coefficients(const ExtensionOperator& op,
                                             const ComplexMatrix& theta_d1,
                                             const ComplexMatrix& theta_d2,
                                             const QDerivatives& qd, const ComplexMatrix& bs,
                                             const ComplexMatrix& te_dot, const ComplexMatrix& u);

// Gate used between coefficient routes; throws FormulaMismatch when two
// values for the same quantity disagree beyond tol * max(1, |a|, |b|).
void require_coefficients_close(const std::string& label, double a, double b, double tol);

// Structural identities tying the condition blocks, the projection, its
// derivatives, and an eigenvector representative together. Each entry is a
// named defect, already divided by the natural scale of its terms.
struct IdentityReport {
  std::vector<std::pair<std::string, double>> defects;
  double worst() const;
};
IdentityReport check_identities(const ExtensionOperator& op, const BoundaryFamily& fam, double t0,
                                const LambdaGroup& group);

// Quadratic prediction of every branch at the given parameters.
// Row k of the result lists the predicted values of branch k.
std::vector<std::vector<double>> predict(const ExpansionResult& res,
                                         const std::vector<double>& ts);

}  // namespace eigencurve
