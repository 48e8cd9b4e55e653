#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ulab {

using Vector = std::vector<double>;

/// Dense real matrix, row-major. Sized for the small problems this library
/// targets (n <= ~40); no expression templates, no aliasing tricks.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  /// Reshape a row-major flat vector.
  static Matrix from_flat(std::size_t rows, std::size_t cols,
                          std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> v);

  Matrix transpose() const;
  bool is_finite() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s) noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);

/// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * bᵀ
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, std::span<const double> x);
/// aᵀ * x
Vector matvec_t(const Matrix& a, std::span<const double> x);

/// Frobenius inner product trace(aᵀ b).
double inner(const Matrix& a, const Matrix& b);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);

Matrix outer(std::span<const double> u, std::span<const double> v);

}  // namespace ulab
