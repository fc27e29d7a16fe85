#include "eigencurve/discretization.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "eigencurve/errors.hpp"

namespace eigencurve {

namespace {

void require_potential_block(const ComplexMatrix& m, std::size_t n, const char* what) {
  if (m.rows() != n || m.cols() != n)
    throw BadPotential(std::string(what) + ": expected a square block of the declared size");
  if (!m.is_finite()) throw BadPotential(std::string(what) + ": non-finite entry");
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) asym += std::norm(m(i, j) - std::conj(m(j, i)));
  if (std::sqrt(asym) > 1e-12 * std::max(1.0, m.frobenius_norm()))
    throw BadPotential(std::string(what) + ": block is not Hermitian");
}

}  // namespace

PotentialSpec PotentialSpec::zero(std::size_t n) {
  PotentialSpec p;
  p.kind = Kind::kZero;
  p.n = n;
  return p;
}

PotentialSpec PotentialSpec::constant(ComplexMatrix v) {
  PotentialSpec p;
  p.kind = Kind::kConstant;
  p.n = v.rows();
  require_potential_block(v, p.n, "constant potential");
  p.data.push_back(std::move(v));
  return p;
}

PotentialSpec PotentialSpec::polynomial(std::vector<ComplexMatrix> coeffs) {
  if (coeffs.empty()) throw BadPotential("polynomial potential: no coefficients");
  PotentialSpec p;
  p.kind = Kind::kPolynomial;
  p.n = coeffs.front().rows();
  for (const ComplexMatrix& c : coeffs) require_potential_block(c, p.n, "polynomial coefficient");
  p.data = std::move(coeffs);
  return p;
}

PotentialSpec PotentialSpec::samples(std::vector<ComplexMatrix> node_values) {
  if (node_values.empty()) throw BadPotential("sampled potential: no samples");
  PotentialSpec p;
  p.kind = Kind::kSamples;
  p.n = node_values.front().rows();
  for (const ComplexMatrix& c : node_values) require_potential_block(c, p.n, "potential sample");
  p.data = std::move(node_values);
  return p;
}

ComplexMatrix PotentialSpec::at_node(double a, double b, std::size_t N, std::size_t j) const {
  const double h = (b - a) / double(N);
  const double x = a + double(j) * h;
  switch (kind) {
    case Kind::kZero:
      return ComplexMatrix(n, n);
    case Kind::kConstant:
      return data.front();
    case Kind::kPolynomial: {
      // Horner evaluation of sum_k x^k c_k.
      ComplexMatrix v = data.back();
      for (std::size_t k = data.size() - 1; k-- > 0;) v = x * v + data[k];
      return v;
    }
    case Kind::kSamples:
      if (data.size() != N + 1)
        throw BadPotential("sampled potential: expected one sample per grid node");
      return data[j];
  }
  throw BadPotential("potential: unknown kind");
}

DiscreteTriplet build_triplet(double a, double b, std::size_t n, std::size_t N,
                              const PotentialSpec& pot) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
    throw BadGrid("build_triplet: interval endpoints must be finite with a < b");
  if (n < 1) throw BadGrid("build_triplet: component count must be at least 1");
  if (N < 2) throw BadGrid("build_triplet: need at least one interior node");
  if (pot.n != n) throw BadPotential("build_triplet: potential block size differs from n");

  DiscreteTriplet t;
  t.a = a;
  t.b = b;
  t.n = n;
  t.N = N;
  t.h = (b - a) / double(N);
  const double ih2 = 1.0 / (t.h * t.h);

  t.v_nodes.reserve(N - 1);
  double vmax = 0.0;
  for (std::size_t j = 1; j <= N - 1; ++j) {
    t.v_nodes.push_back(pot.at_node(a, b, N, j));
    vmax = std::max(vmax, t.v_nodes.back().max_abs());
  }
  if (t.h * t.h * vmax > 0.1)
    t.warnings.push_back("grid is coarse relative to the potential size");

  t.Astar = ComplexMatrix((N - 1) * n, (N + 1) * n);
  for (std::size_t j = 1; j <= N - 1; ++j) {
    const std::size_t r = (j - 1) * n;
    for (std::size_t c = 0; c < n; ++c) {
      t.Astar(r + c, (j - 1) * n + c) = -ih2;
      t.Astar(r + c, (j + 1) * n + c) = -ih2;
      t.Astar(r + c, j * n + c) = 2.0 * ih2;
    }
    const ComplexMatrix& v = t.v_nodes[j - 1];
    for (std::size_t rr = 0; rr < n; ++rr)
      for (std::size_t cc = 0; cc < n; ++cc) t.Astar(r + rr, j * n + cc) += v(rr, cc);
  }

  const double ih = 1.0 / t.h;
  t.T = ComplexMatrix(4 * n, (N + 1) * n);
  for (std::size_t c = 0; c < n; ++c) {
    t.T(c, c) = 1.0;                          // u_0
    t.T(n + c, N * n + c) = 1.0;              // u_N
    t.T(2 * n + c, n + c) = ih;               // (u_1 - u_0)/h
    t.T(2 * n + c, c) = -ih;
    t.T(3 * n + c, (N - 1) * n + c) = ih;     // (u_{N-1} - u_N)/h
    t.T(3 * n + c, N * n + c) = -ih;
  }
  return t;
}

ComplexMatrix restrict_interior(const DiscreteTriplet& t, const ComplexMatrix& full) {
  if (full.rows() != t.full_dim())
    throw DimensionMismatch("restrict_interior: expected a full-grid vector");
  return full.block(t.n, 0, t.interior_dim(), full.cols());
}

GreenCheck green_defect(const DiscreteTriplet& t, const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.rows() != t.full_dim() || u.cols() != 1 || v.rows() != t.full_dim() || v.cols() != 1)
    throw DimensionMismatch("green_defect: expected two full-grid vectors");
  const Complex left = t.h * dot(t.Astar * u, restrict_interior(t, v));
  const Complex right = t.h * dot(restrict_interior(t, u), t.Astar * v);
  const Complex pairing = omega(t.T * u, t.T * v);
  GreenCheck g;
  g.defect = std::abs(left - right - pairing);
  g.scale = std::abs(left) + std::abs(right) + std::abs(pairing);
  return g;
}

ComplexMatrix multiplication_operator(const DiscreteTriplet& t, const PotentialSpec& p) {
  if (p.n != t.n)
    throw BadPotential("multiplication_operator: potential block size differs from n");
  ComplexMatrix m(t.interior_dim(), t.interior_dim());
  for (std::size_t j = 1; j <= t.N - 1; ++j)
    m.set_block((j - 1) * t.n, (j - 1) * t.n, p.at_node(t.a, t.b, t.N, j));
  return m;
}

GhostExtension ghost_extension(const DiscreteTriplet& t, const LagrangianPlane& plane) {
  if (plane.d != t.d())
    throw DimensionMismatch("ghost_extension: plane dimension differs from boundary dimension");
  const std::size_t n = t.n;
  const double ih = 1.0 / t.h;
  const ComplexMatrix b = plane.X - ih * plane.Y;
  GhostExtension out;
  out.b_floor = smallest_singular_value(b);
  if (out.b_floor <= 1e-10 * std::max(1.0, b.frobenius_norm()))
    throw BoundaryResonance(
        "ghost_extension: boundary condition cannot determine the endpoint values on this grid "
        "(elimination floor " +
        std::to_string(out.b_floor) + ")");
  out.G = solve(b, (-ih) * plane.Y);

  out.E = ComplexMatrix(t.full_dim(), t.interior_dim());
  for (std::size_t k = 0; k < t.interior_dim(); ++k) out.E(n + k, k) = 1.0;
  // Endpoint rows: u_0 couples to (u_1, u_{N-1}) through the top block row
  // of G, u_N through the bottom one. Accumulate so the N = 2 case, where
  // u_1 and u_{N-1} are the same node, stays correct.
  const std::size_t last = (t.N - 2) * n;  // interior column block of u_{N-1}
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      out.E(r, c) += out.G(r, c);
      out.E(r, last + c) += out.G(r, n + c);
      out.E(t.N * n + r, c) += out.G(n + r, c);
      out.E(t.N * n + r, last + c) += out.G(n + r, n + c);
    }
  return out;
}

ExtensionOperator assemble_operator(std::shared_ptr<const DiscreteTriplet> t,
                                    const LagrangianPlane& plane) {
  if (!t) throw DimensionMismatch("assemble_operator: null triplet");
  return assemble_operator(std::move(t), plane, ComplexMatrix());
}

ExtensionOperator assemble_operator(std::shared_ptr<const DiscreteTriplet> t,
                                    const LagrangianPlane& plane,
                                    const ComplexMatrix& interior_term) {
  if (!t) throw DimensionMismatch("assemble_operator: null triplet");
  GhostExtension ge = ghost_extension(*t, plane);
  ComplexMatrix a = t->Astar * ge.E;
  if (!interior_term.empty()) {
    if (interior_term.rows() != t->interior_dim() || interior_term.cols() != t->interior_dim())
      throw DimensionMismatch("assemble_operator: interior term has the wrong shape");
    a += interior_term;
  }
  ExtensionOperator op;
  op.triplet = std::move(t);
  op.plane = plane;
  op.op = certify_hermitian(std::move(a), 1e-10);
  op.E = std::move(ge.E);
  op.TE = op.triplet->T * op.E;
  op.eig = hermitian_eig(op.op);
  return op;
}

}  // namespace eigencurve
