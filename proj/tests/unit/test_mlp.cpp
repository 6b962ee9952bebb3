#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ovicast/error.hpp"
#include "ovicast/models.hpp"

using namespace ovicast;

namespace {

const MlpParams& mlp(const TrainedModel& m) { return std::get<MlpParams>(m.params); }

// Largest relative error between analytic and central-difference gradients.
double gradient_check(const MlpParams& p, const Matrix& X, const Vector& y, double alpha) {
  const auto analytic = mlp_loss_gradient(p, X, y, alpha).gradient;
  const Vector theta = flatten(p);
  const double h = 1e-5;
  double worst = 0.0;
  MlpParams q = p;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    Vector t = theta;
    t[k] = theta[k] + h;
    unflatten(t, q);
    const double up = oracle::mlp_loss(q.weights, q.biases, X, y, alpha);
    t[k] = theta[k] - h;
    unflatten(t, q);
    const double down = oracle::mlp_loss(q.weights, q.biases, X, y, alpha);
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max(std::abs(numeric), std::abs(analytic[k]));
    if (scale > 0.0) worst = std::max(worst, std::abs(numeric - analytic[k]) / scale);
  }
  return worst;
}

}  // namespace

TEST(Mlp, DeadNetworkOutputsOutputBias) {
  MlpParams p = init_mlp(3, MlpConfig{});
  for (auto& w : p.weights) w = Matrix(w.rows(), w.cols(), 0.0);
  for (auto& b : p.biases) b.assign(b.size(), 0.0);
  p.biases.back()[0] = 0.7;
  const TrainedModel m{MlpConfig{}, {"a", "b", "c"}, p, std::nullopt};
  std::mt19937_64 rng(1);
  for (double v : predict(m, oracle::random_matrix(rng, 10, 3, 5.0))) EXPECT_EQ(v, 0.7);
}

TEST(Mlp, InitialisationIsGlorotUniform) {
  MlpConfig cfg;
  cfg.seed = 42;
  const auto p = init_mlp(5, cfg);
  ASSERT_EQ(p.weights.size(), 4u);
  const std::size_t sizes[] = {5, 3, 3, 3, 1};
  for (std::size_t l = 0; l < 4; ++l) {
    EXPECT_EQ(p.weights[l].cols(), sizes[l]);
    EXPECT_EQ(p.weights[l].rows(), sizes[l + 1]);
    const double bound = std::sqrt(6.0 / static_cast<double>(sizes[l] + sizes[l + 1]));
    for (double w : p.weights[l].data()) EXPECT_LE(std::abs(w), bound);
  }
}

TEST(Mlp, ZeroTargetWithLargeAlphaShrinksToZero) {
  std::mt19937_64 rng(2);
  MlpConfig cfg;
  cfg.alpha = 1.0;
  cfg.epochs = 3000;
  const Matrix X = oracle::random_matrix(rng, 30, 4);
  const auto m = fit_mlp(X, Vector(30, 0.0), cfg);
  for (double v : predict(m, X)) EXPECT_LT(std::abs(v), 0.1);
}

TEST(Mlp, LossMatchesIndependentForwardPass) {
  std::mt19937_64 rng(3);
  MlpConfig cfg;
  cfg.seed = 5;
  const auto p = init_mlp(3, cfg);
  const Matrix X = oracle::random_matrix(rng, 7, 3);
  const Vector y = oracle::random_vector(rng, 7);
  EXPECT_NEAR(mlp_loss_gradient(p, X, y, 0.07).loss, oracle::mlp_loss(p.weights, p.biases, X, y, 0.07), 1e-12);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    MlpConfig cfg;
    cfg.seed = trial;
    const auto p = init_mlp(3, cfg);
    const Matrix X = oracle::random_matrix(rng, 4, 3);
    const Vector y = oracle::random_vector(rng, 4);
    EXPECT_LT(gradient_check(p, X, y, cfg.alpha), 1e-5) << "trial " << trial;
  }
}

TEST(Mlp, FlattenRoundTrip) {
  const auto p = init_mlp(4, MlpConfig{});
  MlpParams q = init_mlp(4, MlpConfig{{3, 3, 3}, 0.1, 0.01, 1, 99});
  unflatten(flatten(p), q);
  EXPECT_EQ(flatten(q), flatten(p));
  EXPECT_THROW(unflatten(Vector(3, 0.0), q), Error);
}

TEST(MlpProperty, FiniteLogAndLossDecreases) {
  std::mt19937_64 rng(6);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    MlpConfig cfg;
    cfg.seed = seed;
    cfg.epochs = 1000;
    const Matrix X = oracle::random_matrix(rng, 40, 5);
    Vector y(40);
    for (std::size_t i = 0; i < 40; ++i) y[i] = std::max(0.0, X(i, 0)) - 0.5 * X(i, 1);
    const auto p = mlp(fit_mlp(X, y, cfg));
    for (double l : p.loss_log) EXPECT_TRUE(std::isfinite(l));
    EXPECT_EQ(p.loss_log.size(), 1000u / 50u + 1u);
    EXPECT_LE(p.final_loss, p.initial_loss);
  }
}

TEST(MlpProperty, SameSeedIsBitIdentical) {
  std::mt19937_64 rng(7);
  const Matrix X = oracle::random_matrix(rng, 25, 3);
  const Vector y = oracle::random_vector(rng, 25);
  MlpConfig cfg;
  cfg.seed = 11;
  cfg.epochs = 500;
  const auto a = fit_mlp(X, y, cfg), b = fit_mlp(X, y, cfg);
  EXPECT_EQ(flatten(mlp(a)), flatten(mlp(b)));
  cfg.seed = 12;
  EXPECT_NE(flatten(mlp(fit_mlp(X, y, cfg))), flatten(mlp(a)));
}

TEST(Mlp, DivergedLoss) {
  std::mt19937_64 rng(8);
  MlpConfig cfg;
  cfg.learning_rate = 1e6;
  cfg.epochs = 200;
  try {
    fit_mlp(oracle::random_matrix(rng, 20, 3, 10.0), oracle::random_vector(rng, 20, 100.0), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivergedLoss);
  }
}
