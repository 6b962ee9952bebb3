#include "ovicast/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ovicast/error.hpp"

namespace ovicast {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

}  // namespace

SymmetricEigen jacobi_eigen(Matrix a) {
  const std::size_t n = a.rows();
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const double tol = 1e-12 * std::max(1.0, frobenius_norm(a));
  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps && off_diagonal_norm(a) >= tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // A <- J^T A J with J the (p, q) Givens rotation.
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (off_diagonal_norm(a) >= tol)
    throw Error(ErrorKind::NoConvergence, "Jacobi eigen-decomposition after " + std::to_string(sweep) + " sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t src = order[r];
    out.values[r] = a(src, src);
    std::size_t arg = 0;
    for (std::size_t k = 0; k < n; ++k) {
      out.vectors(r, k) = v(k, src);
      if (std::abs(v(k, src)) > std::abs(v(arg, src))) arg = k;
    }
    if (out.vectors(r, arg) < 0.0)
      for (std::size_t k = 0; k < n; ++k) out.vectors(r, k) = -out.vectors(r, k);
  }
  return out;
}

Matrix sample_covariance(const Matrix& X, const Vector& means) {
  const std::size_t d = X.cols();
  Matrix cov(d, d);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    auto row = X.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      const double di = row[i] - means[i];
      for (std::size_t j = i; j < d; ++j) cov(i, j) += di * (row[j] - means[j]);
    }
  }
  const double denom = static_cast<double>(X.rows() - 1);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) cov(j, i) = cov(i, j) = cov(i, j) / denom;
  return cov;
}

PcaModel fit_pca(const Matrix& X, std::size_t n_components) {
  if (X.rows() < 2) throw Error(ErrorKind::TooFewSamples, "PCA needs at least 2 rows");
  const std::size_t limit = std::min(X.rows() - 1, X.cols());
  if (n_components == 0 || n_components > limit)
    throw Error(ErrorKind::TooManyComponents, std::to_string(n_components) + " components requested, at most " +
                                                  std::to_string(limit) + " available");
  PcaModel m;
  m.means.assign(X.cols(), 0.0);
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t c = 0; c < X.cols(); ++c) m.means[c] += X(r, c);
  for (auto& v : m.means) v /= static_cast<double>(X.rows());

  const Matrix cov = sample_covariance(X, m.means);
  for (std::size_t i = 0; i < cov.rows(); ++i) m.total_variance += cov(i, i);
  if (!(m.total_variance > 0.0)) throw Error(ErrorKind::DegenerateData, "all columns are constant");

  auto eig = jacobi_eigen(cov);
  m.components = Matrix(n_components, X.cols());
  for (std::size_t r = 0; r < n_components; ++r) {
    auto src = eig.vectors.row(r);
    std::copy(src.begin(), src.end(), m.components.row(r).begin());
    m.explained_variance.push_back(eig.values[r]);
  }
  return m;
}

Vector transform_row(const PcaModel& m, std::span<const double> x) {
  if (x.size() != m.n_inputs())
    throw Error(ErrorKind::ShapeMismatch,
                "PCA expects " + std::to_string(m.n_inputs()) + " inputs, got " + std::to_string(x.size()));
  Vector centered(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) centered[j] = x[j] - m.means[j];
  Vector z(m.n_components());
  for (std::size_t c = 0; c < z.size(); ++c) z[c] = dot(centered, m.components.row(c));
  return z;
}

Matrix transform(const PcaModel& m, const Matrix& X) {
  if (X.cols() != m.n_inputs())
    throw Error(ErrorKind::ShapeMismatch,
                "PCA expects " + std::to_string(m.n_inputs()) + " columns, got " + std::to_string(X.cols()));
  Matrix Z(X.rows(), m.n_components());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    auto z = transform_row(m, X.row(r));
    std::copy(z.begin(), z.end(), Z.row(r).begin());
  }
  return Z;
}

Matrix inverse_transform(const PcaModel& m, const Matrix& Z) {
  if (Z.cols() != m.n_components())
    throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(m.n_components()) + " score columns, got " +
                                              std::to_string(Z.cols()));
  Matrix X(Z.rows(), m.n_inputs());
  for (std::size_t r = 0; r < Z.rows(); ++r)
    for (std::size_t j = 0; j < m.n_inputs(); ++j) {
      double s = m.means[j];
      for (std::size_t c = 0; c < m.n_components(); ++c) s += Z(r, c) * m.components(c, j);
      X(r, j) = s;
    }
  return X;
}

}  // namespace ovicast
