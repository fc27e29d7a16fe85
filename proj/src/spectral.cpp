#include "eigencurve/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "eigencurve/errors.hpp"

namespace eigencurve {

namespace {

LambdaGroup group_around(const ExtensionOperator& op, std::size_t anchor, double cluster_tol) {
  const std::vector<double>& vals = op.eig.values;
  const std::size_t dim = vals.size();
  const double window = cluster_tol * op.eig.scale();

  std::size_t lo = anchor, hi = anchor;
  while (lo > 0 && vals[lo] - vals[lo - 1] <= window) --lo;
  while (hi + 1 < dim && vals[hi + 1] - vals[hi] <= window) ++hi;

  LambdaGroup g;
  g.m = hi - lo + 1;
  g.indices.resize(g.m);
  double mean = 0.0;
  for (std::size_t k = 0; k < g.m; ++k) {
    g.indices[k] = lo + k;
    mean += vals[lo + k];
  }
  g.lambda = mean / double(g.m);

  double dist = std::numeric_limits<double>::infinity();
  if (lo > 0) dist = std::min(dist, g.lambda - vals[lo - 1]);
  if (hi + 1 < dim) dist = std::min(dist, vals[hi + 1] - g.lambda);
  g.radius = 0.5 * dist;
  if (!(g.radius > 10.0 * window))
    throw NotIsolated("lambda_group: cluster at " + std::to_string(g.lambda) +
                      " is not isolated (radius " + std::to_string(g.radius) + ")");

  g.U = ComplexMatrix(dim, g.m);
  for (std::size_t k = 0; k < g.m; ++k) g.U.set_block(0, k, op.eig.vectors.col(lo + k));
  g.P = g.U * g.U.adjoint();

  g.S = ComplexMatrix(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) {
    if (k >= lo && k <= hi) continue;
    const double w = 1.0 / (vals[k] - g.lambda);
    const ComplexMatrix vk = op.eig.vectors.col(k);
    for (std::size_t i = 0; i < dim; ++i) {
      const Complex wi = w * vk(i, 0);
      for (std::size_t j = 0; j < dim; ++j) g.S(i, j) += wi * std::conj(vk(j, 0));
    }
  }
  return g;
}

}  // namespace

LambdaGroup lambda_group(const ExtensionOperator& op, double query, double cluster_tol) {
  const std::vector<double>& vals = op.eig.values;
  if (vals.empty()) throw DimensionMismatch("lambda_group: empty spectrum");
  std::size_t anchor = 0;
  double best = std::abs(vals[0] - query);
  for (std::size_t k = 1; k < vals.size(); ++k) {
    const double d = std::abs(vals[k] - query);
    if (d < best) {
      best = d;
      anchor = k;
    }
  }
  return group_around(op, anchor, cluster_tol);
}

LambdaGroup lambda_group_by_index(const ExtensionOperator& op, std::size_t index,
                                  double cluster_tol) {
  if (index >= op.eig.values.size())
    throw DimensionMismatch("lambda_group_by_index: index beyond spectrum size");
  return group_around(op, index, cluster_tol);
}

ComplexMatrix resolvent(const ExtensionOperator& op, Complex zeta) {
  const std::vector<double>& vals = op.eig.values;
  const std::size_t dim = vals.size();
  for (double v : vals)
    if (std::abs(v - zeta) <= 1e-12 * op.eig.scale())
      throw SpectralPointHit("resolvent: shift is on the spectrum");
  ComplexMatrix scaled(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const Complex w = 1.0 / (vals[k] - zeta);
    for (std::size_t i = 0; i < dim; ++i) scaled(i, k) = w * op.eig.vectors(i, k);
  }
  return scaled * op.eig.vectors.adjoint();
}

ComplexMatrix resolvent_via_solve(const ExtensionOperator& op, Complex zeta) {
  for (double v : op.eig.values)
    if (std::abs(v - zeta) <= 1e-12 * op.eig.scale())
      throw SpectralPointHit("resolvent_via_solve: shift is on the spectrum");
  const std::size_t dim = op.dim();
  ComplexMatrix shifted = op.op.matrix;
  for (std::size_t i = 0; i < dim; ++i) shifted(i, i) -= zeta;
  return solve(shifted, ComplexMatrix::identity(dim));
}

ComplexMatrix boundary_compression(const ExtensionOperator& op, const ComplexMatrix& m) {
  if (m.rows() != op.dim() || m.cols() != op.dim())
    throw DimensionMismatch("boundary_compression: operator must act on the interior space");
  return (1.0 / op.h()) * (op.TE * m * op.TE.adjoint());
}

ComplexMatrix contour_projection(const ExtensionOperator& op, const LambdaGroup& group,
                                 std::size_t points) {
  const std::size_t dim = op.dim();
  const double r = group.radius;
  ComplexMatrix acc(dim, dim);
  for (std::size_t j = 0; j < points; ++j) {
    const double theta = 2.0 * M_PI * double(j) / double(points);
    const Complex phase(std::cos(theta), std::sin(theta));
    const Complex zeta = group.lambda + r * phase;
    acc += phase * resolvent_via_solve(op, zeta);
  }
  return (-r / double(points)) * acc;
}

ComplexMatrix contour_reduced_resolvent(const ExtensionOperator& op, const LambdaGroup& group,
                                        std::size_t points) {
  const std::size_t dim = op.dim();
  ComplexMatrix acc(dim, dim);
  for (std::size_t j = 0; j < points; ++j) {
    const double theta = 2.0 * M_PI * double(j) / double(points);
    const Complex phase(std::cos(theta), std::sin(theta));
    const Complex zeta = group.lambda + group.radius * phase;
    acc += resolvent_via_solve(op, zeta);
  }
  return (1.0 / double(points)) * acc;
}

}  // namespace eigencurve
