#pragma once
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace eigencurve {

using Complex = std::complex<double>;

// Dense complex matrix with row-major storage. Column vectors are represented
// as single-column matrices so the whole library speaks one type.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);  // zero-filled
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
  static ComplexMatrix column(std::vector<Complex> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  Complex* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
  const Complex* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  Complex trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool is_finite() const;
  bool is_real(double tol = 0.0) const;

  ComplexMatrix block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const;
  void set_block(std::size_t i0, std::size_t j0, const ComplexMatrix& b);
  ComplexMatrix col(std::size_t j) const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, const ComplexMatrix& a);
ComplexMatrix operator*(const ComplexMatrix& a, Complex s);
ComplexMatrix operator*(double s, const ComplexMatrix& a);
ComplexMatrix operator-(const ComplexMatrix& a);

ComplexMatrix hstack(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix vstack(const ComplexMatrix& a, const ComplexMatrix& b);

// Euclidean pairing, linear in the first argument: sum_i x_i * conj(y_i).
Complex dot(const ComplexMatrix& x, const ComplexMatrix& y);
double vec_norm(const ComplexMatrix& x);

}  // namespace eigencurve
