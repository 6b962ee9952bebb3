#include <limits>

#include "common.hpp"
#include "ovicast/models.hpp"
#include "ovicast/splits.hpp"

namespace ovicast {

TrainedModel fit_ols(const Matrix& X, std::span<const double> y, std::vector<std::string> names) {
  detail::check_xy(X, y, 1, "fit_ols");
  names = detail::resolve_names(std::move(names), X.cols());
  const std::size_t d = X.cols() + 1;
  if (X.rows() < d)
    throw Error(ErrorKind::SingularDesign, std::to_string(X.rows()) + " rows cannot determine " +
                                               std::to_string(d) + " coefficients");
  // Normal equations on the intercept-augmented design [1 | X].
  Matrix xtx(d, d);
  Vector xty(d, 0.0);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    auto row = X.row(r);
    auto at = [&](std::size_t j) { return j == 0 ? 1.0 : row[j - 1]; };
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = at(i);
      xty[i] += xi * y[r];
      for (std::size_t j = i; j < d; ++j) xtx(i, j) += xi * at(j);
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) xtx(i, j) = xtx(j, i);

  Vector beta;
  if (!cholesky_solve(xtx, xty, beta)) throw Error(ErrorKind::SingularDesign, "X^T X is not positive definite");
  LinearParams p;
  p.intercept = beta[0];
  p.coef.assign(beta.begin() + 1, beta.end());
  return {LinearConfig{}, std::move(names), std::move(p), std::nullopt};
}

LinearParams ridge_solve(const Matrix& X, std::span<const double> y, double lambda) {
  detail::check_xy(X, y, 1, "ridge");
  const std::size_t n = X.rows(), d = X.cols();
  Vector xbar(d, 0.0);
  double ybar = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < d; ++j) xbar[j] += X(r, j);
    ybar += y[r];
  }
  for (auto& v : xbar) v /= static_cast<double>(n);
  ybar /= static_cast<double>(n);

  // Centering removes the intercept from the penalised system.
  Matrix a(d, d);
  Vector b(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double yc = y[r] - ybar;
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = X(r, i) - xbar[i];
      b[i] += xi * yc;
      for (std::size_t j = i; j < d; ++j) a(i, j) += xi * (X(r, j) - xbar[j]);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    a(i, i) += lambda;
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
  }
  LinearParams p;
  if (!cholesky_solve(a, b, p.coef))
    throw Error(ErrorKind::SingularDesign, "ridge system singular at lambda " + std::to_string(lambda));
  p.intercept = ybar - dot(xbar, p.coef);
  p.lambda = lambda;
  return p;
}

namespace {

double linear_mse(const LinearParams& p, const Matrix& X, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const double e = y[r] - (p.intercept + dot(p.coef, X.row(r)));
    s += e * e;
  }
  return s / static_cast<double>(X.rows());
}

}  // namespace

TrainedModel fit_ridge(const Matrix& X, std::span<const double> y, const RidgeConfig& cfg,
                       std::vector<std::string> names) {
  validate(cfg);
  detail::check_xy(X, y, 1, "fit_ridge");
  names = detail::resolve_names(std::move(names), X.cols());

  std::size_t best = 0;
  Vector cv_mse;
  if (cfg.lambda_grid.size() > 1) {
    const auto folds = time_series_splits(X.rows(), cfg.cv_folds);
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < cfg.lambda_grid.size(); ++g) {
      double total = 0.0;
      for (const auto& f : folds) {
        const auto p = ridge_solve(X.select_rows(f.train_idx), select(y, f.train_idx), cfg.lambda_grid[g]);
        total += linear_mse(p, X.select_rows(f.test_idx), select(y, f.test_idx));
      }
      cv_mse.push_back(total / static_cast<double>(folds.size()));
      if (cv_mse.back() < best_score) {
        best_score = cv_mse.back();
        best = g;
      }
    }
  }
  auto p = ridge_solve(X, y, cfg.lambda_grid[best]);
  p.cv_mse = std::move(cv_mse);
  return {cfg, std::move(names), std::move(p), std::nullopt};
}

}  // namespace ovicast
