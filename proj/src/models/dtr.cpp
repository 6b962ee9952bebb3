#include <algorithm>
#include <cmath>
#include <numeric>

#include "common.hpp"
#include "ovicast/models.hpp"

namespace ovicast {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double sse = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& Z, std::span<const double> y, const DtrConfig& cfg) : Z_(Z), y_(y), cfg_(cfg) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> all(Z_.rows());
    std::iota(all.begin(), all.end(), 0);
    grow(all, 0);
    return std::move(nodes_);
  }

 private:
  int grow(const std::vector<std::size_t>& idx, std::size_t depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double sum = 0.0;
    for (auto i : idx) sum += y_[i];
    const double mean = sum / static_cast<double>(idx.size());
    nodes_[id].value = mean;
    nodes_[id].samples = idx.size();
    if (depth >= cfg_.max_depth || idx.size() < cfg_.min_samples_split) return id;

    double node_sse = 0.0;
    for (auto i : idx) node_sse += (y_[i] - mean) * (y_[i] - mean);
    const double tie = 1e-12 * std::max(1.0, node_sse);
    const auto best = best_split(idx, mean, tie);
    if (best.feature < 0 || !(best.sse < node_sse - tie)) return id;

    std::vector<std::size_t> left, right;
    for (auto i : idx) (Z_(i, best.feature) <= best.threshold ? left : right).push_back(i);
    nodes_[id].feature = best.feature;
    nodes_[id].threshold = best.threshold;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  // Sorted sweep with running sums of mean-centred targets. Candidates are
  // visited by feature then ascending threshold; a later one wins only if
  // its SSE is lower by more than `tie`.
  Split best_split(const std::vector<std::size_t>& idx, double mean, double tie) const {
    Split best;
    best.sse = std::numeric_limits<double>::infinity();
    const std::size_t m = idx.size();
    std::vector<std::size_t> order(idx);
    for (std::size_t f = 0; f < Z_.cols(); ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return Z_(a, f) < Z_(b, f); });
      double total = 0.0, total_sq = 0.0;
      for (auto i : order) {
        const double c = y_[i] - mean;
        total += c;
        total_sq += c * c;
      }
      double left = 0.0, left_sq = 0.0;
      for (std::size_t pos = 1; pos < m; ++pos) {
        const double c = y_[order[pos - 1]] - mean;
        left += c;
        left_sq += c * c;
        const double lo = Z_(order[pos - 1], f), hi = Z_(order[pos], f);
        if (!(lo < hi)) continue;
        const double nl = static_cast<double>(pos), nr = static_cast<double>(m - pos);
        const double right = total - left, right_sq = total_sq - left_sq;
        const double sse = (left_sq - left * left / nl) + (right_sq - right * right / nr);
        if (sse < best.sse - tie) {
          double thr = 0.5 * (lo + hi);
          if (thr >= hi) thr = lo;
          best = {static_cast<int>(f), thr, sse};
        }
      }
    }
    return best;
  }

  const Matrix& Z_;
  std::span<const double> y_;
  const DtrConfig& cfg_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

TrainedModel fit_dtr(const Matrix& X, std::span<const double> y, const DtrConfig& cfg,
                     std::vector<std::string> names) {
  validate(cfg);
  detail::check_xy(X, y, 1, "fit_dtr");
  names = detail::resolve_names(std::move(names), X.cols());
  DtrParams p;
  Matrix Z = X;
  const std::size_t comps = detail::usable_components(cfg.pca_components, X);
  if (comps > 0) {
    p.pca = fit_pca(X, comps);
    Z = transform(*p.pca, X);
  }
  p.nodes = TreeBuilder(Z, y, cfg).build();
  return {cfg, std::move(names), std::move(p), std::nullopt};
}

double dtr_predict_point(const DtrParams& p, std::span<const double> z) {
  int id = 0;
  while (p.nodes[id].feature >= 0) {
    const auto& node = p.nodes[id];
    id = z[node.feature] <= node.threshold ? node.left : node.right;
  }
  return p.nodes[id].value;
}

}  // namespace ovicast
