#include "eigencurve/discretization.hpp"

#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "eigencurve/errors.hpp"
#include "test_support.hpp"

using eigencurve::build_triplet;
using eigencurve::Complex;
using eigencurve::ComplexMatrix;
using eigencurve::DiscreteTriplet;
using eigencurve::green_defect;
using eigencurve::LagrangianPlane;
using eigencurve::PotentialSpec;
using testsupport::max_abs_diff;
using testsupport::random_hermitian;
using testsupport::random_vector;

namespace {

PotentialSpec mixed_potential(std::mt19937_64& rng, std::size_t n) {
  std::vector<ComplexMatrix> coeffs;
  coeffs.push_back(random_hermitian(rng, n));
  coeffs.push_back(random_hermitian(rng, n));
  coeffs.push_back(random_hermitian(rng, n));
  return PotentialSpec::polynomial(std::move(coeffs));
}

}  // namespace

TEST_CASE("grid and potential validation") {
  PotentialSpec z1 = PotentialSpec::zero(1);
  CHECK_THROWS_AS(build_triplet(0.0, 1.0, 1, 1, z1), eigencurve::BadGrid);
  CHECK_THROWS_AS(build_triplet(1.0, 0.0, 1, 10, z1), eigencurve::BadGrid);
  CHECK_THROWS_AS(build_triplet(0.0, 1.0, 2, 10, z1), eigencurve::BadPotential);

  ComplexMatrix nonherm = ComplexMatrix::from_rows({{1.0, 2.0}, {3.0, 1.0}});
  CHECK_THROWS_AS(PotentialSpec::constant(nonherm), eigencurve::BadPotential);

  // Sample count must match the grid.
  PotentialSpec s = PotentialSpec::samples({ComplexMatrix::identity(1), ComplexMatrix::identity(1)});
  CHECK_THROWS_AS(build_triplet(0.0, 1.0, 1, 10, s), eigencurve::BadPotential);
}

TEST_CASE("hand-computed pairing for endpoint and first-node vectors") {
  DiscreteTriplet t = build_triplet(0.0, 1.0, 1, 4, PotentialSpec::zero(1));
  REQUIRE(t.h == 0.25);
  ComplexMatrix u(t.full_dim(), 1);
  u(0, 0) = 1.0;  // endpoint node only
  ComplexMatrix v(t.full_dim(), 1);
  v(1, 0) = 1.0;  // first interior node only
  const Complex left = t.h * eigencurve::dot(t.Astar * u, restrict_interior(t, v));
  const Complex pairing = eigencurve::omega(t.T * u, t.T * v);
  CHECK(left == Complex(-4.0, 0.0));
  CHECK(pairing == Complex(-4.0, 0.0));
  eigencurve::GreenCheck g = green_defect(t, u, v);
  CHECK(g.defect == 0.0);
}

TEST_CASE("integration-by-parts identity is exact for random data") {
  std::mt19937_64 rng(41);
  for (auto [n, N] : {std::pair<std::size_t, std::size_t>{1, 23},
                      std::pair<std::size_t, std::size_t>{2, 40},
                      std::pair<std::size_t, std::size_t>{3, 17}}) {
    DiscreteTriplet t = build_triplet(-0.3, 1.1, n, N, mixed_potential(rng, n));
    for (int trial = 0; trial < 10; ++trial) {
      ComplexMatrix u = random_vector(rng, t.full_dim());
      ComplexMatrix v = random_vector(rng, t.full_dim());
      eigencurve::GreenCheck g = green_defect(t, u, v);
      CHECK(g.defect <= 1e-13 * std::max(1.0, g.scale));
    }
  }
}

TEST_CASE("fixed-endpoint realization reproduces the closed-form spectrum") {
  const std::size_t N = 24;
  auto t = std::make_shared<const DiscreteTriplet>(
      build_triplet(0.0, 1.0, 1, N, PotentialSpec::zero(1)));
  LagrangianPlane dirichlet = eigencurve::make_plane(ComplexMatrix::identity(2), ComplexMatrix(2, 2));
  eigencurve::ExtensionOperator op = eigencurve::assemble_operator(t, dirichlet);
  REQUIRE(op.eig.values.size() == N - 1);
  const double scale = 4.0 / (t->h * t->h);
  for (std::size_t k = 1; k <= N - 1; ++k) {
    const double s = std::sin(0.5 * double(k) * M_PI / double(N));
    const double expect = scale * s * s;
    CHECK(std::abs(op.eig.values[k - 1] - expect) <= 1e-12 * scale);
  }
  // Endpoint rows of the extension are zero: interior data extends by zero.
  CHECK(op.E.block(0, 0, 1, op.dim()).max_abs() == 0.0);
  CHECK(op.E.block(N, 0, 1, op.dim()).max_abs() == 0.0);
}

TEST_CASE("free-endpoint realization annihilates constants exactly") {
  const std::size_t N = 30;
  auto t = std::make_shared<const DiscreteTriplet>(
      build_triplet(0.0, 1.0, 1, N, PotentialSpec::zero(1)));
  LagrangianPlane neumann = eigencurve::make_plane(ComplexMatrix(2, 2), ComplexMatrix::identity(2));
  eigencurve::ExtensionOperator op = eigencurve::assemble_operator(t, neumann);
  ComplexMatrix ones(op.dim(), 1);
  for (std::size_t i = 0; i < op.dim(); ++i) ones(i, 0) = 1.0;
  CHECK((op.op.matrix * ones).max_abs() == 0.0);
  CHECK(std::abs(op.eig.values.front()) <= 1e-12 * (4.0 / (t->h * t->h)));
  // The extension copies the neighbor value into each endpoint.
  ComplexMatrix full = op.E * ones;
  CHECK(std::abs(full(0, 0) - Complex(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(full(N, 0) - Complex(1.0, 0.0)) < 1e-14);
}

TEST_CASE("generic complex condition assembles to a certified Hermitian matrix") {
  std::mt19937_64 rng(42);
  const std::size_t n = 2, N = 30;
  auto t = std::make_shared<const DiscreteTriplet>(
      build_triplet(0.0, 1.0, n, N, mixed_potential(rng, n)));
  LagrangianPlane plane = eigencurve::robin_plane(random_hermitian(rng, 2 * n));
  eigencurve::ExtensionOperator op = eigencurve::assemble_operator(t, plane);
  CHECK(op.op.defect <= 1e-12);
  CHECK(op.eig.values.size() == op.dim());
  // Residual of one eigenpair against the assembled matrix.
  const std::size_t k = op.dim() / 2;
  ComplexMatrix vk = op.eig.vectors.col(k);
  CHECK(eigencurve::vec_norm(op.op.matrix * vk - op.eig.values[k] * vk) <=
        1e-10 * op.op.matrix.frobenius_norm());
}

TEST_CASE("multiplication operator places node values on the diagonal") {
  DiscreteTriplet t = build_triplet(0.0, 1.0, 1, 4, PotentialSpec::zero(1));
  ComplexMatrix c0(1, 1), c1(1, 1);
  c0(0, 0) = -0.5;
  c1(0, 0) = 1.0;
  PotentialSpec ramp = PotentialSpec::polynomial({c0, c1});  // x - 1/2
  ComplexMatrix m = eigencurve::multiplication_operator(t, ramp);
  CHECK(m(0, 0) == Complex(-0.25, 0.0));
  CHECK(m(1, 1) == Complex(0.0, 0.0));
  CHECK(m(2, 2) == Complex(0.25, 0.0));
  CHECK(m.frobenius_norm() == doctest::Approx(std::sqrt(0.125)).epsilon(1e-15));
}

TEST_CASE("endpoint elimination fails exactly at a resonant condition") {
  DiscreteTriplet t = build_triplet(0.0, 1.0, 1, 10, PotentialSpec::zero(1));
  // X = I, Y = h I makes B = X - Y/h vanish identically.
  LagrangianPlane res = eigencurve::make_plane(ComplexMatrix::identity(2),
                                               t.h * ComplexMatrix::identity(2));
  CHECK_THROWS_AS(eigencurve::ghost_extension(t, res), eigencurve::BoundaryResonance);
}
