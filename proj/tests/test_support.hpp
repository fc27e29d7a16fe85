#pragma once
#include <random>

#include "eigencurve/matrix.hpp"

namespace testsupport {

using eigencurve::Complex;
using eigencurve::ComplexMatrix;

inline ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c,
                                   bool complex_entries = true) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      m(i, j) = complex_entries ? Complex(u(rng), u(rng)) : Complex(u(rng), 0.0);
  return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t n,
                                      bool complex_entries = true) {
  ComplexMatrix a = random_matrix(rng, n, n, complex_entries);
  return 0.5 * (a + a.adjoint());
}

inline ComplexMatrix random_vector(std::mt19937_64& rng, std::size_t n,
                                   bool complex_entries = true) {
  return random_matrix(rng, n, 1, complex_entries);
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).max_abs();
}

}  // namespace testsupport
