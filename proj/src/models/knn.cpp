#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "ovicast/models.hpp"

namespace ovicast {

double chebyshev_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::LengthMismatch,
                "chebyshev_distance: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

TrainedModel fit_knn(const Matrix& X, std::span<const double> y, const KnnConfig& cfg,
                     std::vector<std::string> names) {
  validate(cfg);
  detail::check_xy(X, y, cfg.k, "fit_knn");
  names = detail::resolve_names(std::move(names), X.cols());
  KnnParams p;
  const std::size_t comps = detail::usable_components(cfg.pca_components, X);
  if (comps > 0) {
    p.pca = fit_pca(X, comps);
    p.points = transform(*p.pca, X);
  } else {
    p.points = X;
  }
  p.targets.assign(y.begin(), y.end());
  return {cfg, std::move(names), std::move(p), std::nullopt};
}

/// Uniform average over every training point within the k-th smallest
/// distance (ties at rank k are all included), summed in training order.
double knn_predict_point(const KnnParams& p, std::size_t k, std::span<const double> z) {
  const std::size_t n = p.points.rows();
  Vector dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = chebyshev_distance(p.points.row(i), z);
  Vector sorted = dist;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
  const double kth = sorted[k - 1];
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (dist[i] <= kth) {
      sum += p.targets[i];
      ++count;
    }
  return sum / static_cast<double>(count);
}

}  // namespace ovicast
