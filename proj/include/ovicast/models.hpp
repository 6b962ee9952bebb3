#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ovicast/matrix.hpp"
#include "ovicast/pca.hpp"

namespace ovicast {

// ---------------------------------------------------------------------------
// Configuration. Defaults are the tuned hyperparameters of the reference
// study; anything the study left unstated is documented per field.

struct LinearConfig {};

struct RidgeConfig {
  Vector lambda_grid{1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2};
  std::size_t cv_folds = 5;  ///< time-series-split folds used to pick lambda
};

struct SvrConfig {
  double c = 0.887453;
  double gamma = 0.015561;
  /// When set, gamma is replaced at fit time by 1 / (n_features * var(X)).
  bool gamma_scale = false;
  double epsilon = 0.1;
  double tol = 1e-6;
  std::size_t max_passes = 10000;  ///< SMO pair updates
};

struct MlpConfig {
  std::vector<std::size_t> hidden{3, 3, 3};
  double alpha = 0.070921;  ///< L2 coefficient on weights (not biases)
  double learning_rate = 1e-2;
  std::size_t epochs = 5000;
  std::uint64_t seed = 0;
};

/// Uniform weights, Chebyshev metric, exhaustive search.
struct KnnConfig {
  std::size_t k = 4;
  std::size_t pca_components = 5;  ///< 0 disables the PCA pre-transform
};

/// Best-split CART on squared error.
struct DtrConfig {
  std::size_t max_depth = 3;
  std::size_t min_samples_split = 5;
  std::size_t pca_components = 2;  ///< 0 disables the PCA pre-transform
};

using ModelConfig = std::variant<LinearConfig, RidgeConfig, SvrConfig, MlpConfig, KnnConfig, DtrConfig>;

/// "linear", "ridge", "svr", "mlp", "knn" or "dtr".
std::string_view model_name(const ModelConfig& cfg);
ModelConfig default_config(std::string_view name);
/// Throws Config on out-of-range hyperparameters.
void validate(const ModelConfig& cfg);

// ---------------------------------------------------------------------------
// Fitted parameters.

struct LinearParams {
  Vector coef;
  double intercept = 0.0;
  double lambda = 0.0;
  Vector cv_mse;  ///< ridge only: mean validation MSE per grid entry
};

struct SvrParams {
  Matrix support;   ///< training rows with a nonzero dual coefficient
  Vector dual_coef; ///< alpha - alpha_star for each support row
  double bias = 0.0;
  double gamma = 0.0;  ///< effective kernel coefficient
  Vector alpha;        ///< all training points
  Vector alpha_star;
  std::size_t iterations = 0;
  double kkt_violation = 0.0;
  double dual_objective = 0.0;
};

struct MlpParams {
  std::vector<Matrix> weights;  ///< layer l maps size[l] -> size[l+1]; out x in
  std::vector<Vector> biases;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  Vector loss_log;  ///< every 50 epochs plus the final value
};

struct KnnParams {
  std::optional<PcaModel> pca;
  Matrix points;  ///< training rows in neighbor space
  Vector targets;
};

struct TreeNode {
  int feature = -1;  ///< -1 for a leaf
  double threshold = 0.0;
  int left = -1;  ///< samples with x[feature] <= threshold
  int right = -1;
  double value = 0.0;
  std::size_t samples = 0;
};

struct DtrParams {
  std::optional<PcaModel> pca;
  std::vector<TreeNode> nodes;  ///< nodes[0] is the root
};

using ModelParams = std::variant<LinearParams, SvrParams, MlpParams, KnnParams, DtrParams>;

/// Scaling applied to raw features before the model sees them, and to the
/// target for back-transformation of predictions.
struct Normalization {
  Vector feature_means;
  Vector feature_sds;
  double target_mean = 0.0;
  double target_sd = 1.0;
};

struct TrainedModel {
  ModelConfig config;
  std::vector<std::string> feature_names;
  ModelParams params;
  std::optional<Normalization> normalization;

  [[nodiscard]] std::size_t n_features() const noexcept { return feature_names.size(); }
};

// ---------------------------------------------------------------------------
// Fitting. `names` may be empty, in which case x0, x1, ... are used.

TrainedModel fit_ols(const Matrix& X, std::span<const double> y, std::vector<std::string> names = {});
/// Ridge with unpenalized intercept at a single lambda.
LinearParams ridge_solve(const Matrix& X, std::span<const double> y, double lambda);
TrainedModel fit_ridge(const Matrix& X, std::span<const double> y, const RidgeConfig& cfg,
                       std::vector<std::string> names = {});

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);
TrainedModel fit_svr(const Matrix& X, std::span<const double> y, const SvrConfig& cfg,
                     std::vector<std::string> names = {});
/// Minimization form of the epsilon-SVR dual:
/// 1/2 d^T K d + eps * sum(a + a*) - y^T d, with d = a - a*.
double svr_dual_objective(const Matrix& kernel, std::span<const double> y, std::span<const double> alpha,
                          std::span<const double> alpha_star, double epsilon);

/// Glorot-uniform initialisation from the seeded generator.
MlpParams init_mlp(std::size_t n_inputs, const MlpConfig& cfg);
/// Flattened parameters: per layer, weights row-major then biases.
Vector flatten(const MlpParams& p);
void unflatten(std::span<const double> theta, MlpParams& p);
struct LossGradient {
  double loss = 0.0;
  Vector gradient;  ///< same layout as flatten()
};
/// Mean squared error plus alpha * (sum of squared weights).
LossGradient mlp_loss_gradient(const MlpParams& p, const Matrix& X, std::span<const double> y, double alpha);
TrainedModel fit_mlp(const Matrix& X, std::span<const double> y, const MlpConfig& cfg,
                     std::vector<std::string> names = {});

double chebyshev_distance(std::span<const double> a, std::span<const double> b);
TrainedModel fit_knn(const Matrix& X, std::span<const double> y, const KnnConfig& cfg,
                     std::vector<std::string> names = {});

TrainedModel fit_dtr(const Matrix& X, std::span<const double> y, const DtrConfig& cfg,
                     std::vector<std::string> names = {});

TrainedModel fit(const ModelConfig& cfg, const Matrix& X, std::span<const double> y,
                 std::vector<std::string> names = {});

Vector predict(const TrainedModel& m, const Matrix& X);

}  // namespace ovicast
