#include "oracles.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include <unistd.h>

namespace oracle {

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double sd) {
  std::normal_distribution<double> dist(0.0, sd);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

Vector random_vector(std::mt19937_64& rng, std::size_t n, double sd) {
  std::normal_distribution<double> dist(0.0, sd);
  Vector v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

LinearFit normal_equations(const Matrix& X, std::span<const double> y) {
  const auto n = static_cast<Eigen::Index>(X.rows());
  const auto p = static_cast<Eigen::Index>(X.cols());
  Eigen::MatrixXd A(n, p + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) A(i, j + 1) = X(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd AtA = A.transpose() * A;
  const Eigen::VectorXd Atb = A.transpose() * b;
  const Eigen::VectorXd beta = AtA.ldlt().solve(Atb);
  LinearFit f;
  f.intercept = beta(0);
  for (Eigen::Index j = 0; j < p; ++j) f.coef.push_back(beta(j + 1));
  return f;
}

LinearFit ridge_closed_form(const Matrix& X, std::span<const double> y, double lambda) {
  const auto n = static_cast<Eigen::Index>(X.rows());
  const auto p = static_cast<Eigen::Index>(X.cols());
  Eigen::MatrixXd A(n, p);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) A(i, j) = X(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::RowVectorXd xm = A.colwise().mean();
  const double ym = b.mean();
  A.rowwise() -= xm;
  b.array() -= ym;
  const Eigen::MatrixXd G = A.transpose() * A + lambda * Eigen::MatrixXd::Identity(p, p);
  const Eigen::VectorXd beta = G.ldlt().solve(A.transpose() * b);
  LinearFit f;
  for (Eigen::Index j = 0; j < p; ++j) f.coef.push_back(beta(j));
  f.intercept = ym - xm.dot(beta);
  return f;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const long double mx = sx / n, my = sy / n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

double pearson_p(double r, std::size_t n) {
  const double df = static_cast<double>(n) - 2.0;
  if (std::abs(r) >= 1.0) return 0.0;
  const double t = r * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double knn_predict(const Matrix& points, std::span<const double> targets, std::size_t k,
                   std::span<const double> query) {
  const std::size_t n = points.rows();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < points.cols(); ++j) d = std::max(d, std::abs(points(i, j) - query[j]));
    dist[i] = d;
  }
  std::vector<double> sorted = dist;
  std::sort(sorted.begin(), sorted.end());
  const double kth = sorted[std::min(k, n) - 1];
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (dist[i] <= kth) {
      sum += targets[i];
      ++count;
    }
  return sum / static_cast<double>(count);
}

namespace {

double sse_of(std::span<const double> y, const std::vector<std::size_t>& idx) {
  if (idx.empty()) return 0.0;
  double m = 0.0;
  for (auto i : idx) m += y[i];
  m /= static_cast<double>(idx.size());
  double s = 0.0;
  for (auto i : idx) s += (y[i] - m) * (y[i] - m);
  return s;
}

double grow(const Matrix& X, std::span<const double> y, const std::vector<std::size_t>& idx, std::size_t depth,
            std::size_t max_depth, std::size_t min_split) {
  const double parent = sse_of(y, idx);
  if (depth >= max_depth || idx.size() < min_split) return parent;
  double best = parent;
  std::vector<std::size_t> best_l, best_r;
  for (std::size_t f = 0; f < X.cols(); ++f) {
    std::vector<double> vals;
    for (auto i : idx) vals.push_back(X(i, f));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t t = 0; t + 1 < vals.size(); ++t) {
      const double thr = 0.5 * (vals[t] + vals[t + 1]);
      std::vector<std::size_t> l, r;
      for (auto i : idx) (X(i, f) <= thr ? l : r).push_back(i);
      const double s = sse_of(y, l) + sse_of(y, r);
      if (s < best - 1e-12 * std::max(1.0, parent)) {
        best = s;
        best_l = l;
        best_r = r;
      }
    }
  }
  if (best_l.empty()) return parent;
  return grow(X, y, best_l, depth + 1, max_depth, min_split) + grow(X, y, best_r, depth + 1, max_depth, min_split);
}

}  // namespace

double cart_training_sse(const Matrix& X, std::span<const double> y, std::size_t max_depth,
                         std::size_t min_samples_split) {
  std::vector<std::size_t> all(X.rows());
  std::iota(all.begin(), all.end(), 0);
  return grow(X, y, all, 0, max_depth, min_samples_split);
}

namespace {

// Euclidean projection onto {0 <= z <= C} intersected with {sum(a) = sum(a*)},
// found by bisection on the multiplier of the equality constraint.
Vector project(const Vector& v, std::size_t n, double c) {
  auto shifted = [&](double mu, Vector& z) {
    double s = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i) {
      const double w = i < n ? 1.0 : -1.0;
      z[i] = std::clamp(v[i] - mu * w, 0.0, c);
      s += w * z[i];
    }
    return s;
  };
  Vector z(2 * n);
  double lo = -1e6, hi = 1e6;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shifted(mid, z) > 0.0 ? lo : hi) = mid;
  }
  shifted(0.5 * (lo + hi), z);
  return z;
}

}  // namespace

double svr_dual_minimum(const Matrix& K, std::span<const double> y, double c, double epsilon) {
  const std::size_t n = y.size();
  auto objective = [&](const Vector& z) {
    double quad = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double di = z[i] - z[n + i];
      for (std::size_t j = 0; j < n; ++j) quad += di * K(i, j) * (z[j] - z[n + j]);
      lin += epsilon * (z[i] + z[n + i]) - y[i] * di;
    }
    return 0.5 * quad + lin;
  };
  auto gradient = [&](const Vector& z) {
    Vector g(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      double kd = 0.0;
      for (std::size_t j = 0; j < n; ++j) kd += K(i, j) * (z[j] - z[n + j]);
      g[i] = kd + epsilon - y[i];
      g[n + i] = -kd + epsilon + y[i];
    }
    return g;
  };
  double lipschitz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(K(i, j));
    lipschitz = std::max(lipschitz, 2.0 * row);
  }
  const double step = 1.0 / lipschitz;
  Vector z(2 * n, 0.0), w = z;
  double t = 1.0;
  for (int it = 0; it < 200000; ++it) {
    const Vector g = gradient(w);
    Vector trial(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) trial[i] = w[i] - step * g[i];
    const Vector next = project(trial, n, c);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double change = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i) {
      w[i] = next[i] + (t - 1.0) / tn * (next[i] - z[i]);
      change = std::max(change, std::abs(next[i] - z[i]));
    }
    z = next;
    t = tn;
    if (change < 1e-13 && it > 100) break;
  }
  return objective(z);
}

double mlp_loss(const std::vector<Matrix>& weights, const std::vector<Vector>& biases, const Matrix& X,
                std::span<const double> y, double alpha) {
  double sq = 0.0;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    Vector a(X.row(r).begin(), X.row(r).end());
    for (std::size_t l = 0; l < weights.size(); ++l) {
      Vector next(weights[l].rows());
      for (std::size_t o = 0; o < next.size(); ++o) {
        double s = biases[l][o];
        for (std::size_t i = 0; i < a.size(); ++i) s += weights[l](o, i) * a[i];
        next[o] = l + 1 < weights.size() ? std::max(0.0, s) : s;
      }
      a = std::move(next);
    }
    sq += (a[0] - y[r]) * (a[0] - y[r]);
  }
  double penalty = 0.0;
  for (const auto& w : weights)
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j) penalty += w(i, j) * w(i, j);
  return sq / static_cast<double>(X.rows()) + alpha * penalty;
}

std::vector<EigenPair> power_iteration(const Matrix& a, std::size_t count) {
  const std::size_t n = a.rows();
  Matrix m = a;
  std::vector<EigenPair> out;
  for (std::size_t c = 0; c < count; ++c) {
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i) + 0.01 * static_cast<double>(c);
    double lambda = 0.0;
    for (int it = 0; it < 100000; ++it) {
      Vector w(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w[i] += m(i, j) * v[j];
      double norm = 0.0;
      for (double x : w) norm += x * x;
      norm = std::sqrt(norm);
      if (norm == 0.0) break;
      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        w[i] /= norm;
        diff = std::max(diff, std::abs(w[i] - v[i]));
      }
      v = w;
      lambda = norm;
      if (diff < 1e-15) break;
    }
    out.push_back({lambda, v});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) -= lambda * v[i] * v[j];
  }
  return out;
}

std::vector<std::size_t> dealt_block_sizes(std::size_t n, std::size_t k) {
  std::vector<std::size_t> sizes(k + 1, 0);
  for (std::size_t i = 0; i < n; ++i) ++sizes[i % (k + 1)];
  return sizes;
}

std::filesystem::path temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("ovicast_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace oracle
