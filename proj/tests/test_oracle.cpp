#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "eigencurve/errors.hpp"
#include "eigencurve/oracle.hpp"
#include "test_support.hpp"

using namespace eigencurve;

namespace {

std::shared_ptr<const DiscreteTriplet> grid(double a, double b, std::size_t n, std::size_t N,
                                            const PotentialSpec& pot) {
  return std::make_shared<const DiscreteTriplet>(build_triplet(a, b, n, N, pot));
}

MatrixPolynomial scalar_poly(std::vector<double> cs) {
  MatrixPolynomial p;
  for (double c : cs) p.coeffs.push_back(c * ComplexMatrix::identity(2));
  return p;
}

TrackedCurve sampled(const std::vector<double>& ts, const std::vector<double>& vals) {
  TrackedCurve c;
  c.t = ts;
  c.lambda = vals;
  return c;
}

std::vector<double> ladder_grid(double t0, const std::vector<double>& dts) {
  std::vector<double> ts{t0};
  for (double dt : dts) {
    ts.push_back(t0 + dt);
    ts.push_back(t0 - dt);
  }
  return ts;
}

}  // namespace

TEST_CASE("central differences recover polynomial curves exactly") {
  // Dyadic steps around zero keep every sample exactly representable, so
  // the differences carry no rounding noise at all.
  const std::vector<double> dyadic{0x1p-10, 0x1p-11, 0x1p-12};
  std::vector<double> ts = ladder_grid(0.0, dyadic);
  std::sort(ts.begin(), ts.end());

  std::vector<double> quad, line;
  for (double t : ts) {
    quad.push_back(1.0 + 2.0 * t + 3.0 * t * t);
    line.push_back(-0.75 + 0.3125 * t);
  }
  const FdEstimate q = fd_derivatives(sampled(ts, quad), 0.0, dyadic);
  CHECK(std::abs(q.c1 - 2.0) < 1e-10);
  CHECK(std::abs(q.c2 - 3.0) < 1e-10);
  const FdEstimate l = fd_derivatives(sampled(ts, line), 0.0, dyadic);
  CHECK(std::abs(l.c1 - 0.3125) < 1e-10);
  CHECK(std::abs(l.c2) < 1e-10);

  // At a generic anchor the second difference keeps a little cancellation
  // noise; the extrapolated values still settle well under the comparison
  // thresholds.
  const std::vector<double> dts{1e-3, 5e-4, 2.5e-4};
  std::vector<double> gts = ladder_grid(0.4, dts);
  std::sort(gts.begin(), gts.end());
  std::vector<double> gquad;
  for (double t : gts) gquad.push_back(1.0 + 2.0 * t + 3.0 * t * t);
  const FdEstimate g = fd_derivatives(sampled(gts, gquad), 0.4, dts);
  CHECK(std::abs(g.c1 - (2.0 + 6.0 * 0.4)) < 1e-10);
  CHECK(std::abs(g.c2 - 3.0) < 1e-7);
}

TEST_CASE("a corrupted sample trips the ladder consistency guard") {
  const std::vector<double> dts{1e-3, 5e-4, 2.5e-4};
  std::vector<double> ts = ladder_grid(0.0, dts);
  std::sort(ts.begin(), ts.end());
  std::vector<double> vals;
  for (double t : ts) vals.push_back(5.0 * t + t * t);
  // Corrupt the sample at the smallest positive step.
  for (std::size_t j = 0; j < ts.size(); ++j)
    if (std::abs(ts[j] - 2.5e-4) < 1e-15) vals[j] += 1.0;
  CHECK_THROWS_AS(fd_derivatives(sampled(ts, vals), 0.0, dts), LadderInconsistent);
}

TEST_CASE("a missing sample is reported") {
  const std::vector<double> dts{1e-3, 5e-4};
  std::vector<double> ts = ladder_grid(0.0, {1e-3});
  std::vector<double> vals(ts.size(), 1.0);
  CHECK_THROWS_AS(fd_derivatives(sampled(ts, vals), 0.0, dts), BadGrid);
}

TEST_CASE("constant family tracks flat curves and the comparison passes") {
  auto trip = grid(0.0, 1.0, 1, 12, PotentialSpec::zero(1));
  BoundaryFamily fam = BoundaryFamily::robin(scalar_poly({0.8}));
  const ExtensionOperator op0 = operator_at(trip, fam, 0.0);
  const LambdaGroup g0 = lambda_group_by_index(op0, 0, 1e-8);

  const std::vector<double> dts{1e-3, 5e-4, 2.5e-4};
  const TrackedCurves curves = track_curves(trip, fam, g0, ladder_grid(0.0, dts));
  REQUIRE(curves.curves.size() == 1);
  for (double v : curves.curves[0].lambda) CHECK(std::abs(v - g0.lambda) < 1e-12);

  const ExpansionResult res = expand_eigencurves(op0, fam, 0.0, g0);
  const OracleReport report = compare(res, curves, dts);
  REQUIRE(report.branches.size() == 1);
  CHECK(report.all_pass);
  CHECK(report.branches[0].abs_dev_c1 < 1e-9);
  CHECK(report.branches[0].abs_dev_c2 < 1e-6);
}

TEST_CASE("simple eigenvalue curve tracks monotonically with a wide margin") {
  auto trip = grid(0.0, 1.0, 1, 20, PotentialSpec::zero(1));
  BoundaryFamily fam = BoundaryFamily::robin(scalar_poly({0.0, 1.0}));
  const ExtensionOperator op0 = operator_at(trip, fam, 0.0);
  const LambdaGroup g0 = lambda_group_by_index(op0, 0, 1e-8);

  std::vector<double> ts;
  for (int j = 0; j <= 8; ++j) ts.push_back(-0.08 + 0.02 * j);
  const TrackedCurves curves = track_curves(trip, fam, g0, ts);
  CHECK(curves.min_margin >= 0.9);
  const auto& lam = curves.curves[0].lambda;
  for (std::size_t j = 1; j < lam.size(); ++j) CHECK(lam[j] > lam[j - 1]);

  // Reversing the requested grid changes nothing.
  std::vector<double> rev(ts.rbegin(), ts.rend());
  const TrackedCurves again = track_curves(trip, fam, g0, rev);
  CHECK(again.t_grid == curves.t_grid);
  CHECK(again.curves[0].lambda == curves.curves[0].lambda);
}

TEST_CASE("stiffening boundary slope matches its closed discrete form") {
  const std::size_t N = 20;
  auto trip = grid(0.0, 1.0, 1, N, PotentialSpec::zero(1));
  BoundaryFamily fam = BoundaryFamily::robin(scalar_poly({0.0, 1.0}));
  const ExtensionOperator op0 = operator_at(trip, fam, 0.0);
  const LambdaGroup g0 = lambda_group_by_index(op0, 0, 1e-8);

  const std::vector<double> dts{1e-3, 5e-4, 2.5e-4};
  const TrackedCurves curves = track_curves(trip, fam, g0, ladder_grid(0.0, dts));
  const FdEstimate fd = fd_derivatives(curves.curves[0], 0.0, dts);
  CHECK(std::abs(fd.c1 - 2.0 * N / (N - 1.0)) < 1e-8);
}

TEST_CASE("double eigenvalue splits into two stably labeled curves") {
  auto trip = grid(0.0, 1.0, 2, 24, PotentialSpec::zero(2));
  MatrixPolynomial x, y;
  x.coeffs = {ComplexMatrix::identity(4)};
  ComplexMatrix b(4, 4);
  b(0, 1) = 1.0;
  b(1, 0) = 1.0;
  b(2, 3) = 1.0;
  b(3, 2) = 1.0;
  y.coeffs = {ComplexMatrix(4, 4), b};
  BoundaryFamily fam = BoundaryFamily::general(x, y);
  const ExtensionOperator op0 = operator_at(trip, fam, 0.0);
  const LambdaGroup g0 = lambda_group_by_index(op0, 0, 1e-8);
  REQUIRE(g0.m == 2);

  const std::vector<double> dts{1e-3, 5e-4, 2.5e-4};
  const TrackedCurves curves = track_curves(trip, fam, g0, ladder_grid(0.0, dts));
  const FdEstimate fd0 = fd_derivatives(curves.curves[0], 0.0, dts);
  const FdEstimate fd1 = fd_derivatives(curves.curves[1], 0.0, dts);
  CHECK(std::abs(fd0.c1 - fd1.c1) > 1.0);

  // The slope multiset is stable when every step in the ladder is halved.
  const std::vector<double> half{5e-4, 2.5e-4, 1.25e-4};
  const TrackedCurves fine = track_curves(trip, fam, g0, ladder_grid(0.0, half));
  std::vector<double> a{fd0.c1, fd1.c1};
  std::vector<double> c{fd_derivatives(fine.curves[0], 0.0, half).c1,
                        fd_derivatives(fine.curves[1], 0.0, half).c1};
  std::sort(a.begin(), a.end());
  std::sort(c.begin(), c.end());
  CHECK(std::abs(a[0] - c[0]) < 1e-5);
  CHECK(std::abs(a[1] - c[1]) < 1e-5);

  const ExpansionResult res = expand_eigencurves(op0, fam, 0.0, g0);
  const OracleReport report = compare(res, curves, dts);
  CHECK(report.all_pass);
  for (const auto& row : report.branches) {
    CHECK(row.abs_dev_c1 < 1e-6 * std::max(1.0, std::abs(res.lambda)));
  }
}

TEST_CASE("a corrupted engine sign is flagged on the slope column") {
  auto trip = grid(0.0, 1.0, 1, 16, PotentialSpec::zero(1));
  BoundaryFamily fam = BoundaryFamily::robin(scalar_poly({0.2, 1.0}));
  const ExtensionOperator op0 = operator_at(trip, fam, 0.0);
  const LambdaGroup g0 = lambda_group_by_index(op0, 0, 1e-8);

  const std::vector<double> dts{1e-3, 5e-4, 2.5e-4};
  const TrackedCurves curves = track_curves(trip, fam, g0, ladder_grid(0.0, dts));
  ExpansionResult res = expand_eigencurves(op0, fam, 0.0, g0);
  res.branches[0].c1 = -res.branches[0].c1;
  const OracleReport report = compare(res, curves, dts);
  CHECK(!report.all_pass);
  CHECK(!report.branches[0].pass);
  CHECK(report.branches[0].abs_dev_c1 > 1.0);

  const std::string csv = oracle_csv(report);
  CHECK(csv.find("FAIL") != std::string::npos);
  CHECK(csv.rfind("branch_i,branch_k,mu,nu,", 0) == 0);
}

TEST_CASE("prediction and oracle close the loop without diagonalization") {
  auto trip = grid(0.0, 1.0, 1, 20, PotentialSpec::zero(1));
  BoundaryFamily fam = BoundaryFamily::robin(scalar_poly({0.3, 1.0, 0.4}));
  const ExtensionOperator op0 = operator_at(trip, fam, 0.1);
  const LambdaGroup g0 = lambda_group_by_index(op0, 1, 1e-8);
  const ExpansionResult res = expand_eigencurves(op0, fam, 0.1, g0);

  const std::vector<double> dts{1e-3, 5e-4, 2.5e-4};
  std::vector<double> ts = ladder_grid(0.1, dts);
  std::sort(ts.begin(), ts.end());
  const auto rows = predict(res, ts);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const FdEstimate fd = fd_derivatives(sampled(ts, rows[k]), 0.1, dts);
    CHECK(std::abs(fd.c1 - res.branches[k].c1) < 1e-9);
    CHECK(std::abs(fd.c2 - res.branches[k].c2) < 1e-9);
  }
}

TEST_CASE("an unresolved avoided crossing is reported as ambiguous") {
  auto trip = grid(0.0, 1.0, 2, 12, PotentialSpec::zero(2));
  // Two channels whose boundary stiffness crosses at t = 0, weakly coupled:
  // the eigenvector basis rotates through 45 degrees inside |t| < 1e-4.
  ComplexMatrix th0(4, 4), th1(4, 4);
  const double eps = 1e-4;
  th0(0, 0) = 1.0;
  th0(1, 1) = 1.0;
  th0(2, 2) = 1.0;
  th0(3, 3) = 1.0;
  th0(0, 1) = eps;
  th0(1, 0) = eps;
  th0(2, 3) = eps;
  th0(3, 2) = eps;
  th1(0, 0) = 5.0;
  th1(1, 1) = -5.0;
  th1(2, 2) = 5.0;
  th1(3, 3) = -5.0;
  MatrixPolynomial th;
  th.coeffs = {th0, th1};
  BoundaryFamily fam = BoundaryFamily::robin(th);

  const ExtensionOperator op0 = operator_at(trip, fam, -0.02);
  const LambdaGroup g0 = lambda_group_by_index(op0, 0, 8e-4);
  REQUIRE(g0.m == 2);

  // Stepping straight onto the crossing point leaves the labels undecided.
  CHECK_THROWS_AS(track_curves(trip, fam, g0, {-0.02, -0.01, 0.0}), TrackingAmbiguity);
}
