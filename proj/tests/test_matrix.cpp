#include "eigencurve/matrix.hpp"

#include <random>

#include "doctest.h"
#include "eigencurve/errors.hpp"
#include "test_support.hpp"

using eigencurve::Complex;
using eigencurve::ComplexMatrix;
using testsupport::max_abs_diff;
using testsupport::random_matrix;

TEST_CASE("matrix construction and access") {
  ComplexMatrix z(2, 3);
  CHECK(z.rows() == 2);
  CHECK(z.cols() == 3);
  CHECK(z.max_abs() == 0.0);

  ComplexMatrix m = ComplexMatrix::from_rows({{1.0, 2.0}, {Complex(0, 3), 4.0}});
  CHECK(m(0, 1) == Complex(2.0, 0.0));
  CHECK(m(1, 0) == Complex(0.0, 3.0));
  CHECK(ComplexMatrix::identity(3).trace() == Complex(3.0, 0.0));

  ComplexMatrix v = ComplexMatrix::column({1.0, Complex(0, -1)});
  CHECK(v.rows() == 2);
  CHECK(v.cols() == 1);
}

TEST_CASE("matrix product against hand computation") {
  ComplexMatrix a = ComplexMatrix::from_rows({{1.0, Complex(0, 1)}, {2.0, -1.0}});
  ComplexMatrix b = ComplexMatrix::from_rows({{3.0, 0.0}, {1.0, Complex(0, -2)}});
  ComplexMatrix p = a * b;
  CHECK(p(0, 0) == Complex(3.0, 1.0));
  CHECK(p(0, 1) == Complex(2.0, 0.0));
  CHECK(p(1, 0) == Complex(5.0, 0.0));
  CHECK(p(1, 1) == Complex(0.0, 2.0));
}

TEST_CASE("adjoint transpose trace") {
  std::mt19937_64 rng(11);
  ComplexMatrix a = random_matrix(rng, 4, 6);
  ComplexMatrix ad = a.adjoint();
  CHECK(ad.rows() == 6);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) CHECK(ad(j, i) == std::conj(a(i, j)));
  CHECK(max_abs_diff(a.transpose().transpose(), a) == 0.0);
}

TEST_CASE("product adjoint identity (AB)^* = B^* A^*") {
  std::mt19937_64 rng(12);
  ComplexMatrix a = random_matrix(rng, 3, 5);
  ComplexMatrix b = random_matrix(rng, 5, 4);
  CHECK(max_abs_diff((a * b).adjoint(), b.adjoint() * a.adjoint()) < 1e-14);
}

TEST_CASE("dot is linear in the first argument") {
  ComplexMatrix x = ComplexMatrix::column({Complex(1, 2)});
  ComplexMatrix y = ComplexMatrix::column({Complex(0, 1)});
  // (1+2i) * conj(i) = (1+2i)(-i) = 2 - i
  CHECK(eigencurve::dot(x, y) == Complex(2.0, -1.0));
  CHECK(eigencurve::dot(y, x) == std::conj(eigencurve::dot(x, y)));
}

TEST_CASE("block and stacking round trips") {
  std::mt19937_64 rng(13);
  ComplexMatrix a = random_matrix(rng, 3, 2);
  ComplexMatrix b = random_matrix(rng, 3, 4);
  ComplexMatrix h = hstack(a, b);
  CHECK(h.cols() == 6);
  CHECK(max_abs_diff(h.block(0, 0, 3, 2), a) == 0.0);
  CHECK(max_abs_diff(h.block(0, 2, 3, 4), b) == 0.0);

  ComplexMatrix c = random_matrix(rng, 2, 6);
  ComplexMatrix vcat = vstack(h, c);
  CHECK(vcat.rows() == 5);
  CHECK(max_abs_diff(vcat.block(3, 0, 2, 6), c) == 0.0);

  ComplexMatrix z(5, 6);
  z.set_block(0, 0, h);
  z.set_block(3, 0, c);
  CHECK(max_abs_diff(z, vcat) == 0.0);
}

TEST_CASE("shape mismatches throw") {
  ComplexMatrix a(2, 3);
  ComplexMatrix b(3, 3);
  CHECK_THROWS_AS(a + b, eigencurve::DimensionMismatch);
  CHECK_THROWS_AS(b * a, eigencurve::DimensionMismatch);
}

TEST_CASE("is_real detects exact realness") {
  ComplexMatrix a = ComplexMatrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  CHECK(a.is_real(0.0));
  a(1, 1) = Complex(4.0, 1e-30);
  CHECK_FALSE(a.is_real(0.0));
  CHECK(a.is_real(1e-20));
}
