#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace daa {

/// Dense row-major matrix of doubles.
///
/// Used for every data carrier in the library: observations X (n x p),
/// mixture weights A (n x k), construction weights B (k x n) and archetypes
/// Z (k x p). A 1 x 1 matrix doubles as a scalar in the autodiff engine.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix row_vector(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  Matrix transpose() const;
  Matrix select_rows(std::span<const std::size_t> idx) const;

  bool all_finite() const noexcept;
  /// "rows x cols", used in error messages.
  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Standard matrix product. Throws ShapeError when a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

/// Squared Frobenius norm.
double squared_norm(const Matrix& a);
double frobenius_distance(const Matrix& a, const Matrix& b);
double dot(std::span<const double> a, std::span<const double> b);

/// Throws ShapeError naming `what` and both shapes unless rows/cols match.
void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

}  // namespace daa
