#include <cmath>
#include <type_traits>

#include "common.hpp"
#include "ovicast/models.hpp"

namespace ovicast {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::Config, what);
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

std::string_view model_name(const ModelConfig& cfg) {
  return std::visit(overloaded{
                        [](const LinearConfig&) { return std::string_view("linear"); },
                        [](const RidgeConfig&) { return std::string_view("ridge"); },
                        [](const SvrConfig&) { return std::string_view("svr"); },
                        [](const MlpConfig&) { return std::string_view("mlp"); },
                        [](const KnnConfig&) { return std::string_view("knn"); },
                        [](const DtrConfig&) { return std::string_view("dtr"); },
                    },
                    cfg);
}

ModelConfig default_config(std::string_view name) {
  if (name == "linear") return LinearConfig{};
  if (name == "ridge") return RidgeConfig{};
  if (name == "svr") return SvrConfig{};
  if (name == "mlp") return MlpConfig{};
  if (name == "knn") return KnnConfig{};
  if (name == "dtr") return DtrConfig{};
  throw Error(ErrorKind::UnknownModel, "'" + std::string(name) + "' (expected linear|ridge|svr|mlp|knn|dtr)");
}

void validate(const ModelConfig& cfg) {
  std::visit(overloaded{
                 [](const LinearConfig&) {},
                 [](const RidgeConfig& c) {
                   require(!c.lambda_grid.empty(), "ridge.lambda_grid must not be empty");
                   for (double l : c.lambda_grid)
                     require(l >= 0.0 && std::isfinite(l), "ridge.lambda_grid entries must be >= 0");
                   require(c.cv_folds >= 2, "ridge.cv_folds must be >= 2");
                 },
                 [](const SvrConfig& c) {
                   require(positive(c.c), "svr.c must be > 0");
                   require(positive(c.gamma), "svr.gamma must be > 0");
                   require(positive(c.epsilon), "svr.epsilon must be > 0");
                   require(positive(c.tol), "svr.tol must be > 0");
                 },
                 [](const MlpConfig& c) {
                   require(positive(c.alpha), "mlp.alpha must be > 0");
                   require(positive(c.learning_rate), "mlp.learning_rate must be > 0");
                   for (auto h : c.hidden) require(h >= 1, "mlp.hidden layer sizes must be >= 1");
                 },
                 [](const KnnConfig& c) { require(c.k >= 1, "knn.k must be >= 1"); },
                 [](const DtrConfig& c) {
                   require(c.max_depth >= 1, "dtr.max_depth must be >= 1");
                   require(c.min_samples_split >= 2, "dtr.min_samples_split must be >= 2");
                 },
             },
             cfg);
}

TrainedModel fit(const ModelConfig& cfg, const Matrix& X, std::span<const double> y,
                 std::vector<std::string> names) {
  return std::visit(overloaded{
                        [&](const LinearConfig&) { return fit_ols(X, y, std::move(names)); },
                        [&](const RidgeConfig& c) { return fit_ridge(X, y, c, std::move(names)); },
                        [&](const SvrConfig& c) { return fit_svr(X, y, c, std::move(names)); },
                        [&](const MlpConfig& c) { return fit_mlp(X, y, c, std::move(names)); },
                        [&](const KnnConfig& c) { return fit_knn(X, y, c, std::move(names)); },
                        [&](const DtrConfig& c) { return fit_dtr(X, y, c, std::move(names)); },
                    },
                    cfg);
}

Vector predict(const TrainedModel& m, const Matrix& X) {
  if (X.cols() != m.n_features() && X.rows() > 0)
    throw Error(ErrorKind::ShapeMismatch, "model expects " + std::to_string(m.n_features()) + " features, got " +
                                              std::to_string(X.cols()));
  Vector out;
  out.reserve(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const auto x = X.row(r);
    out.push_back(std::visit(
        overloaded{
            [&](const LinearParams& p) { return p.intercept + dot(p.coef, x); },
            [&](const SvrParams& p) {
              double f = p.bias;
              for (std::size_t s = 0; s < p.support.rows(); ++s)
                f += p.dual_coef[s] * rbf_kernel(p.support.row(s), x, p.gamma);
              return f;
            },
            [&](const MlpParams& p) { return mlp_predict_row(p, x); },
            [&](const KnnParams& p) {
              const auto& cfg = std::get<KnnConfig>(m.config);
              if (p.pca) return knn_predict_point(p, cfg.k, transform_row(*p.pca, x));
              return knn_predict_point(p, cfg.k, x);
            },
            [&](const DtrParams& p) {
              if (p.pca) return dtr_predict_point(p, transform_row(*p.pca, x));
              return dtr_predict_point(p, x);
            },
        },
        m.params));
  }
  return out;
}

}  // namespace ovicast
