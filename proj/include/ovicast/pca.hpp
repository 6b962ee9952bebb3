#pragma once

#include <cstddef>

#include "ovicast/matrix.hpp"

namespace ovicast {

struct SymmetricEigen {
  Vector values;   ///< descending
  Matrix vectors;  ///< row i is the unit eigenvector for values[i]
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix, iterated until the
/// off-diagonal Frobenius norm drops below 1e-12 (relative to the matrix norm
/// once that exceeds 1).
SymmetricEigen jacobi_eigen(Matrix a);

/// Sample covariance (divisor n-1) of the columns of X.
Matrix sample_covariance(const Matrix& X, const Vector& means);

struct PcaModel {
  Vector means;               ///< per input column
  Matrix components;          ///< n_components x n_inputs, orthonormal rows
  Vector explained_variance;  ///< non-increasing
  double total_variance = 0.0;

  [[nodiscard]] std::size_t n_components() const noexcept { return components.rows(); }
  [[nodiscard]] std::size_t n_inputs() const noexcept { return means.size(); }
};

/// Requires 1 <= n_components <= min(rows - 1, cols). Each component's
/// largest-magnitude entry is made positive.
PcaModel fit_pca(const Matrix& X, std::size_t n_components);

/// (X - means) * components^T
Matrix transform(const PcaModel& m, const Matrix& X);
Vector transform_row(const PcaModel& m, std::span<const double> x);
/// Z * components + means
Matrix inverse_transform(const PcaModel& m, const Matrix& Z);

}  // namespace ovicast
