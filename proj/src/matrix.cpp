#include "eigencurve/matrix.hpp"

#include <cmath>
#include <utility>

#include "eigencurve/errors.hpp"

namespace eigencurve {

namespace {
void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch(std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
}
}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex(0.0, 0.0)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_)
    throw DimensionMismatch("ComplexMatrix: entry count does not match shape");
  if (!is_finite()) throw EigencurveError("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  ComplexMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionMismatch("from_rows: ragged rows");
    std::size_t j = 0;
    for (const auto& v : row) m(i, j++) = v;
    ++i;
  }
  if (!m.is_finite()) throw EigencurveError("from_rows: non-finite entry");
  return m;
}

ComplexMatrix ComplexMatrix::column(std::vector<Complex> entries) {
  const std::size_t n = entries.size();
  return ComplexMatrix(n, 1, std::move(entries));
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

Complex ComplexMatrix::trace() const {
  if (rows_ != cols_) throw DimensionMismatch("trace: matrix not square");
  Complex t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double s = 0.0;
  for (const auto& v : data_) s = std::max(s, std::abs(v));
  return s;
}

bool ComplexMatrix::is_finite() const {
  for (const auto& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

bool ComplexMatrix::is_real(double tol) const {
  for (const auto& v : data_)
    if (std::abs(v.imag()) > tol) return false;
  return true;
}

ComplexMatrix ComplexMatrix::block(std::size_t i0, std::size_t j0, std::size_t r,
                                   std::size_t c) const {
  if (i0 + r > rows_ || j0 + c > cols_) throw DimensionMismatch("block: out of range");
  ComplexMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = (*this)(i0 + i, j0 + j);
  return m;
}

void ComplexMatrix::set_block(std::size_t i0, std::size_t j0, const ComplexMatrix& b) {
  if (i0 + b.rows() > rows_ || j0 + b.cols() > cols_)
    throw DimensionMismatch("set_block: out of range");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
}

ComplexMatrix ComplexMatrix::col(std::size_t j) const { return block(0, j, rows_, 1); }

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix m = a;
  m += b;
  return m;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix m = a;
  m -= b;
  return m;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("operator*: inner dimensions disagree");
  ComplexMatrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex* ci = c.row_ptr(i);
    const Complex* ai = a.row_ptr(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = ai[k];
      if (aik == Complex(0.0, 0.0)) continue;
      const Complex* bk = b.row_ptr(k);
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
  ComplexMatrix m = a;
  m *= s;
  return m;
}

ComplexMatrix operator*(const ComplexMatrix& a, Complex s) { return s * a; }
ComplexMatrix operator*(double s, const ComplexMatrix& a) { return Complex(s, 0.0) * a; }
ComplexMatrix operator-(const ComplexMatrix& a) { return Complex(-1.0, 0.0) * a; }

ComplexMatrix hstack(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionMismatch("hstack: row counts differ");
  ComplexMatrix m(a.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(0, a.cols(), b);
  return m;
}

ComplexMatrix vstack(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.cols()) throw DimensionMismatch("vstack: column counts differ");
  ComplexMatrix m(a.rows() + b.rows(), a.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), 0, b);
  return m;
}

Complex dot(const ComplexMatrix& x, const ComplexMatrix& y) {
  if (x.cols() != 1 || y.cols() != 1 || x.rows() != y.rows())
    throw DimensionMismatch("dot: expects equal-length column vectors");
  Complex s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) s += x(i, 0) * std::conj(y(i, 0));
  return s;
}

double vec_norm(const ComplexMatrix& x) { return x.frobenius_norm(); }

}  // namespace eigencurve
