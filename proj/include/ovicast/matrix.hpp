#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ovicast {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Rows are exposed as spans so that
/// per-sample code never touches raw pointers.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> init);

  static Matrix from_rows(const std::vector<Vector>& rows);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool empty() const noexcept { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  [[nodiscard]] std::span<double> row(std::size_t r) noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  [[nodiscard]] Vector column(std::size_t c) const;
  [[nodiscard]] Matrix select_rows(std::span<const std::size_t> idx) const;
  [[nodiscard]] Matrix transpose() const;
  [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);

[[nodiscard]] Vector select(std::span<const double> v, std::span<const std::size_t> idx);
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);

/// Solves A x = b for symmetric positive-definite A by Cholesky factorization.
/// Returns false when a pivot is not positive relative to the diagonal scale.
bool cholesky_solve(Matrix a, Vector b, Vector& x);

}  // namespace ovicast
