#include "eigencurve/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "eigencurve/errors.hpp"

namespace eigencurve {

HermitianCertificate certify_hermitian(ComplexMatrix m, double tol) {
  if (m.rows() != m.cols()) throw DimensionMismatch("certify_hermitian: matrix not square");
  if (!m.is_finite()) throw EigencurveError("certify_hermitian: non-finite entry");
  double asym = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) asym += std::norm(m(i, j) - std::conj(m(j, i)));
  const double defect = std::sqrt(asym) / std::max(1.0, m.frobenius_norm());
  if (defect > tol)
    throw SelfAdjointnessDefect("certify_hermitian: relative asymmetry " + std::to_string(defect));
  return HermitianCertificate{std::move(m), defect};
}

double Eigensystem::scale() const {
  double s = 1.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

namespace {

inline double conj_v(double x) { return x; }
inline Complex conj_v(const Complex& x) { return std::conj(x); }
inline double abs_v(double x) { return std::abs(x); }
inline double abs_v(const Complex& x) { return std::abs(x); }
inline double real_v(double x) { return x; }
inline double real_v(const Complex& x) { return x.real(); }
inline double unit_phase(double x) { return x >= 0.0 ? 1.0 : -1.0; }
inline Complex unit_phase(const Complex& x) { return x / std::abs(x); }

// Cyclic-by-rows Jacobi diagonalization, in place. The rotation for the
// pivot pair (p, q) is the unitary [[c, sigma], [-conj(sigma), c]] with real
// c; the pivot angle comes from the stable tangent formula applied to
// |a_pq|, and the phase of a_pq is absorbed into sigma. Early sweeps skip
// pivots below a threshold so the quadratic regime is reached quickly; later
// sweeps flush entries that can no longer move the diagonal at machine
// precision to exact zero, so the iteration normally terminates with an
// exactly diagonal matrix.
template <class T>
void jacobi_sweeps(std::vector<T>& a, std::vector<T>& v, std::size_t n, double fro) {
  double prev_off = std::numeric_limits<double>::infinity();
  const int max_sweeps = 64;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += abs_v(a[p * n + q]);
    if (off == 0.0) return;
    if (sweep >= 6 && off >= prev_off) {
      // Rounding floor: accept if the leftover off-diagonal mass is far
      // below the certified residual bound, otherwise report failure.
      if (off <= 1e-10 * std::max(1.0, fro)) return;
      throw NonConvergence("hermitian_eig: off-diagonal stagnated at " + std::to_string(off));
    }
    prev_off = off;
    const double thresh = sweep < 4 ? 0.2 * off / double(n * n) : 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        T g = a[p * n + q];
        double ag = abs_v(g);
        if (ag == 0.0) continue;
        double app = real_v(a[p * n + p]);
        double aqq = real_v(a[q * n + q]);
        if (sweep > 4 && std::abs(app) + 100.0 * ag == std::abs(app) &&
            std::abs(aqq) + 100.0 * ag == std::abs(aqq)) {
          a[p * n + q] = T(0);
          a[q * n + p] = T(0);
          continue;
        }
        if (ag <= thresh) continue;
        const double zeta = (aqq - app) / (2.0 * ag);
        double t;
        if (std::abs(zeta) > 1e7) {
          t = 1.0 / (2.0 * zeta);
        } else {
          t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const auto sigma = unit_phase(g) * s;
        for (std::size_t k = 0; k < n; ++k) {
          const T akp = a[k * n + p];
          const T akq = a[k * n + q];
          a[k * n + p] = c * akp - conj_v(sigma) * akq;
          a[k * n + q] = sigma * akp + c * akq;
        }
        T* rowp = a.data() + p * n;
        T* rowq = a.data() + q * n;
        for (std::size_t k = 0; k < n; ++k) {
          const T apk = rowp[k];
          const T aqk = rowq[k];
          rowp[k] = c * apk - sigma * aqk;
          rowq[k] = conj_v(sigma) * apk + c * aqk;
        }
        a[p * n + p] = T(app - t * ag);
        a[q * n + q] = T(aqq + t * ag);
        a[p * n + q] = T(0);
        a[q * n + p] = T(0);
        for (std::size_t k = 0; k < n; ++k) {
          const T vkp = v[k * n + p];
          const T vkq = v[k * n + q];
          v[k * n + p] = c * vkp - conj_v(sigma) * vkq;
          v[k * n + q] = sigma * vkp + c * vkq;
        }
      }
    }
  }
  throw NonConvergence("hermitian_eig: sweep budget exhausted");
}

template <class T>
Eigensystem jacobi_eig(const ComplexMatrix& m) {
  const std::size_t n = m.rows();
  // Work on the Hermitian average so tiny certified asymmetry cannot bias
  // the two-sided updates.
  std::vector<T> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Complex h = 0.5 * (m(i, j) + std::conj(m(j, i)));
      if constexpr (std::is_same_v<T, double>)
        a[i * n + j] = h.real();
      else
        a[i * n + j] = h;
    }
  std::vector<T> v(n * n, T(0));
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = T(1);
  jacobi_sweeps(a, v, n, m.frobenius_norm());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = real_v(a[i * n + i]);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });

  Eigensystem out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.values[c] = diag[src];
    // Deterministic phase: rotate the entry of largest modulus (lowest index
    // on ties) to the positive real axis.
    std::size_t imax = 0;
    double amax = -1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double av = abs_v(v[k * n + src]);
      if (av > amax) {
        amax = av;
        imax = k;
      }
    }
    const auto ph = conj_v(unit_phase(v[imax * n + src]));
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, c) = Complex(ph * v[k * n + src]);
  }
  return out;
}

}  // namespace

Eigensystem hermitian_eig(const HermitianCertificate& cert) {
  const ComplexMatrix& m = cert.matrix;
  if (m.rows() == 0) return Eigensystem{{}, ComplexMatrix(0, 0)};
  if (m.is_real(0.0)) return jacobi_eig<double>(m);
  return jacobi_eig<Complex>(m);
}

ComplexMatrix solve(const ComplexMatrix& m, const ComplexMatrix& rhs) {
  if (m.rows() != m.cols()) throw DimensionMismatch("solve: matrix not square");
  if (m.rows() != rhs.rows()) throw DimensionMismatch("solve: rhs row count mismatch");
  const std::size_t n = m.rows();
  const std::size_t w = rhs.cols();
  ComplexMatrix lu = m;
  ComplexMatrix x = rhs;
  const double pivot_floor = 1e-13 * std::max(1.0, m.frobenius_norm());
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double cand = std::abs(lu(i, k));
      if (cand > best) {
        best = cand;
        piv = i;
      }
    }
    if (best < pivot_floor) throw SingularMatrix("solve: pivot " + std::to_string(best));
    if (piv != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      for (std::size_t j = 0; j < w; ++j) std::swap(x(k, j), x(piv, j));
    }
    const Complex d = lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = lu(i, k) / d;
      if (f == Complex(0.0, 0.0)) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      for (std::size_t j = 0; j < w; ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (std::size_t kk = n; kk-- > 0;) {
    for (std::size_t j = 0; j < w; ++j) {
      Complex acc = x(kk, j);
      for (std::size_t i = kk + 1; i < n; ++i) acc -= lu(kk, i) * x(i, j);
      x(kk, j) = acc / lu(kk, kk);
    }
  }
  return x;
}

ComplexMatrix weighted_adjoint(const ComplexMatrix& m, double row_weight, double col_weight) {
  // Contract: <Mx, y>_row = <x, A y>_col with <u, v>_w = w * sum_i u_i
  // conj(v_i), which forces A = (row_weight / col_weight) * adjoint(M). The
  // pairing identity is the contract; it is what the tests pin down.
  if (!(row_weight > 0.0) || !(col_weight > 0.0))
    throw EigencurveError("weighted_adjoint: weights must be positive");
  return (row_weight / col_weight) * m.adjoint();
}

double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  const bool tall = m.rows() >= m.cols();
  const ComplexMatrix gram = tall ? m.adjoint() * m : m * m.adjoint();
  const Eigensystem es = hermitian_eig(certify_hermitian(gram, 1e-8));
  return std::sqrt(std::max(0.0, es.values.back()));
}

double operator_norm_hermitian(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  const Eigensystem es = hermitian_eig(certify_hermitian(m));
  double out = 0.0;
  for (double v : es.values) out = std::max(out, std::abs(v));
  return out;
}

double smallest_singular_value(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  const bool tall = m.rows() >= m.cols();
  const ComplexMatrix gram = tall ? m.adjoint() * m : m * m.adjoint();
  const Eigensystem es = hermitian_eig(certify_hermitian(gram, 1e-8));
  return std::sqrt(std::max(0.0, es.values.front()));
}

namespace {

// Double-double accumulation. two_sum is Knuth's exact error-free sum;
// two_prod leans on fma for the exact product residual.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline void dd_add(DD& acc, double x) {
  const DD s = two_sum(acc.hi, x);
  const double lo = acc.lo + s.lo;
  acc.hi = s.hi + lo;
  acc.lo = lo - (acc.hi - s.hi);
}

inline void dd_prod_add(DD& acc, double a, double b) {
  const double p = a * b;
  dd_add(acc, p);
  dd_add(acc, std::fma(a, b, -p));
}

}  // namespace

double rayleigh_quotient_refined(const ComplexMatrix& m, const ComplexMatrix& v) {
  if (m.rows() != m.cols()) throw DimensionMismatch("rayleigh_quotient_refined: matrix not square");
  if (v.cols() != 1 || v.rows() != m.rows())
    throw DimensionMismatch("rayleigh_quotient_refined: vector shape");
  const std::size_t n = m.rows();
  if (n == 0) throw DimensionMismatch("rayleigh_quotient_refined: empty");
  DD num;
  for (std::size_t i = 0; i < n; ++i) {
    DD wre, wim;
    const Complex* row = m.row_ptr(i);
    for (std::size_t j = 0; j < n; ++j) {
      const Complex mij = row[j];
      const Complex vj = v(j, 0);
      dd_prod_add(wre, mij.real(), vj.real());
      dd_prod_add(wre, -mij.imag(), vj.imag());
      dd_prod_add(wim, mij.real(), vj.imag());
      dd_prod_add(wim, mij.imag(), vj.real());
    }
    // Re(conj(v_i) * w_i) = re(v_i) re(w_i) + im(v_i) im(w_i)
    const Complex vi = v(i, 0);
    dd_prod_add(num, vi.real(), wre.hi);
    dd_prod_add(num, vi.real(), wre.lo);
    dd_prod_add(num, vi.imag(), wim.hi);
    dd_prod_add(num, vi.imag(), wim.lo);
  }
  DD den;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex vi = v(i, 0);
    dd_prod_add(den, vi.real(), vi.real());
    dd_prod_add(den, vi.imag(), vi.imag());
  }
  const double d = den.hi + den.lo;
  if (d <= 0.0) throw EigencurveError("rayleigh_quotient_refined: zero vector");
  return (num.hi + num.lo) / d;
}

}  // namespace eigencurve
