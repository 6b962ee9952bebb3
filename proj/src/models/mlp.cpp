#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "ovicast/models.hpp"
#include "ovicast/random.hpp"

namespace ovicast {

MlpParams init_mlp(std::size_t n_inputs, const MlpConfig& cfg) {
  std::vector<std::size_t> sizes{n_inputs};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(1);

  Rng rng(cfg.seed);
  MlpParams p;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const std::size_t fan_in = sizes[l], fan_out = sizes[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (std::size_t o = 0; o < fan_out; ++o)
      for (std::size_t i = 0; i < fan_in; ++i) w(o, i) = rng.uniform(-bound, bound);
    Vector b(fan_out);
    for (auto& v : b) v = rng.uniform(-bound, bound);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

Vector flatten(const MlpParams& p) {
  Vector theta;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    theta.insert(theta.end(), p.weights[l].data().begin(), p.weights[l].data().end());
    theta.insert(theta.end(), p.biases[l].begin(), p.biases[l].end());
  }
  return theta;
}

void unflatten(std::span<const double> theta, MlpParams& p) {
  const std::size_t expected = flatten(p).size();
  if (theta.size() != expected)
    throw Error(ErrorKind::ShapeMismatch, "MLP parameter vector has " + std::to_string(theta.size()) +
                                              " entries, expected " + std::to_string(expected));
  std::size_t pos = 0;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    auto& w = p.weights[l];
    for (std::size_t o = 0; o < w.rows(); ++o)
      for (std::size_t i = 0; i < w.cols(); ++i) w(o, i) = theta[pos++];
    for (auto& b : p.biases[l]) b = theta[pos++];
  }
}

namespace {

/// Activations per layer for one sample; the last layer is linear.
std::vector<Vector> forward(const MlpParams& p, std::span<const double> x) {
  std::vector<Vector> acts;
  acts.emplace_back(x.begin(), x.end());
  const std::size_t layers = p.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& w = p.weights[l];
    Vector z(w.rows());
    for (std::size_t o = 0; o < w.rows(); ++o) {
      z[o] = p.biases[l][o] + dot(w.row(o), acts.back());
      if (l + 1 < layers) z[o] = std::max(0.0, z[o]);
    }
    acts.push_back(std::move(z));
  }
  return acts;
}

}  // namespace

double mlp_predict_row(const MlpParams& p, std::span<const double> x) { return forward(p, x).back()[0]; }

LossGradient mlp_loss_gradient(const MlpParams& p, const Matrix& X, std::span<const double> y, double alpha) {
  const std::size_t layers = p.weights.size();
  const double n = static_cast<double>(X.rows());
  MlpParams g = p;
  for (auto& w : g.weights) w = Matrix(w.rows(), w.cols());
  for (auto& b : g.biases) std::fill(b.begin(), b.end(), 0.0);

  double sq = 0.0;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const auto acts = forward(p, X.row(r));
    const double err = acts.back()[0] - y[r];
    sq += err * err;
    Vector delta{2.0 * err / n};
    for (std::size_t l = layers; l-- > 0;) {
      const auto& in = acts[l];
      for (std::size_t o = 0; o < delta.size(); ++o) {
        g.biases[l][o] += delta[o];
        for (std::size_t i = 0; i < in.size(); ++i) g.weights[l](o, i) += delta[o] * in[i];
      }
      if (l == 0) break;
      Vector prev(in.size(), 0.0);
      for (std::size_t i = 0; i < in.size(); ++i) {
        if (!(in[i] > 0.0)) continue;  // ReLU'(z) = 0 for z <= 0
        for (std::size_t o = 0; o < delta.size(); ++o) prev[i] += p.weights[l](o, i) * delta[o];
      }
      delta = std::move(prev);
    }
  }
  double penalty = 0.0;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& w = p.weights[l];
    for (std::size_t o = 0; o < w.rows(); ++o)
      for (std::size_t i = 0; i < w.cols(); ++i) {
        penalty += w(o, i) * w(o, i);
        g.weights[l](o, i) += 2.0 * alpha * w(o, i);
      }
  }
  return {sq / n + alpha * penalty, flatten(g)};
}

TrainedModel fit_mlp(const Matrix& X, std::span<const double> y, const MlpConfig& cfg,
                     std::vector<std::string> names) {
  validate(cfg);
  detail::check_xy(X, y, 2, "fit_mlp");
  names = detail::resolve_names(std::move(names), X.cols());

  MlpParams p = init_mlp(X.cols(), cfg);
  Vector theta = flatten(p);
  constexpr std::size_t kLogEvery = 50;
  for (std::size_t epoch = 0; epoch <= cfg.epochs; ++epoch) {
    auto lg = mlp_loss_gradient(p, X, y, cfg.alpha);
    if (!std::isfinite(lg.loss))
      throw Error(ErrorKind::DivergedLoss, "non-finite loss at epoch " + std::to_string(epoch));
    if (epoch == 0) p.initial_loss = lg.loss;
    if (epoch % kLogEvery == 0 || epoch == cfg.epochs) p.loss_log.push_back(lg.loss);
    if (epoch == cfg.epochs) {
      p.final_loss = lg.loss;
      break;
    }
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= cfg.learning_rate * lg.gradient[k];
    unflatten(theta, p);
  }
  return {cfg, std::move(names), std::move(p), std::nullopt};
}

}  // namespace ovicast
