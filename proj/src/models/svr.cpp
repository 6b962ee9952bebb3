#include <algorithm>
#include <cmath>
#include <limits>

#include "common.hpp"
#include "ovicast/models.hpp"

namespace ovicast {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  if (a.size() != b.size())
    throw Error(ErrorKind::LengthMismatch, "rbf_kernel: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-gamma * d2);
}

double svr_dual_objective(const Matrix& kernel, std::span<const double> y, std::span<const double> alpha,
                          std::span<const double> alpha_star, double epsilon) {
  const std::size_t n = y.size();
  double quad = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double di = alpha[i] - alpha_star[i];
    for (std::size_t j = 0; j < n; ++j) quad += di * (alpha[j] - alpha_star[j]) * kernel(i, j);
    lin += epsilon * (alpha[i] + alpha_star[i]) - y[i] * di;
  }
  return 0.5 * quad + lin;
}

namespace {

// SMO on the 2n-variable form: beta = [alpha; alpha_star], sign s = [+1; -1],
// Q_ij = s_i s_j K, linear term p = [eps - y; eps + y], constraint s^T beta = 0.
// Working pairs are chosen by maximal violation with second-order gain.
struct SmoResult {
  Vector beta;
  double rho = 0.0;
  std::size_t iterations = 0;
  double violation = 0.0;
  bool converged = false;
};

SmoResult solve_smo(const Matrix& K, std::span<const double> y, double C, double eps, double tol,
                    std::size_t max_iter) {
  constexpr double kTau = 1e-12;
  const std::size_t n = y.size(), m = 2 * n;
  auto sign = [n](std::size_t t) { return t < n ? 1.0 : -1.0; };
  auto q = [&](std::size_t a, std::size_t b) { return sign(a) * sign(b) * K(a % n, b % n); };

  Vector beta(m, 0.0), grad(m);
  for (std::size_t i = 0; i < n; ++i) {
    grad[i] = eps - y[i];
    grad[i + n] = eps + y[i];
  }
  auto at_upper = [&](std::size_t t) { return beta[t] >= C; };
  auto at_lower = [&](std::size_t t) { return beta[t] <= 0.0; };

  SmoResult res;
  for (;;) {
    double gmax = -std::numeric_limits<double>::infinity(), gmax2 = gmax;
    std::ptrdiff_t ii = -1;
    for (std::size_t t = 0; t < m; ++t) {
      if (sign(t) > 0) {
        if (!at_upper(t) && -grad[t] >= gmax) {
          gmax = -grad[t];
          ii = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!at_lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        ii = static_cast<std::ptrdiff_t>(t);
      }
    }
    std::ptrdiff_t jj = -1;
    double best_gain = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < m && ii >= 0; ++t) {
      const auto i = static_cast<std::size_t>(ii);
      if (sign(t) > 0) {
        if (at_lower(t)) continue;
        const double diff = gmax + grad[t];
        gmax2 = std::max(gmax2, grad[t]);
        if (diff > 0.0) {
          double quad = q(i, i) + q(t, t) - 2.0 * sign(i) * q(i, t);
          const double gain = -(diff * diff) / (quad > 0.0 ? quad : kTau);
          if (gain <= best_gain) {
            best_gain = gain;
            jj = static_cast<std::ptrdiff_t>(t);
          }
        }
      } else {
        if (at_upper(t)) continue;
        const double diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
        if (diff > 0.0) {
          double quad = q(i, i) + q(t, t) + 2.0 * sign(i) * q(i, t);
          const double gain = -(diff * diff) / (quad > 0.0 ? quad : kTau);
          if (gain <= best_gain) {
            best_gain = gain;
            jj = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
    }
    res.violation = std::max(0.0, gmax + gmax2);
    if (ii < 0 || jj < 0 || gmax + gmax2 < tol) {
      res.converged = true;
      break;
    }
    if (res.iterations >= max_iter) break;
    ++res.iterations;

    const auto i = static_cast<std::size_t>(ii), j = static_cast<std::size_t>(jj);
    const double old_i = beta[i], old_j = beta[j];
    const double qij = q(i, j);
    if (sign(i) != sign(j)) {
      double quad = q(i, i) + q(j, j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = beta[i] - beta[j];
      beta[i] += delta;
      beta[j] += delta;
      if (diff > 0.0) {
        if (beta[j] < 0.0) {
          beta[j] = 0.0;
          beta[i] = diff;
        }
      } else if (beta[i] < 0.0) {
        beta[i] = 0.0;
        beta[j] = -diff;
      }
      if (diff > 0.0) {
        if (beta[i] > C) {
          beta[i] = C;
          beta[j] = C - diff;
        }
      } else if (beta[j] > C) {
        beta[j] = C;
        beta[i] = C + diff;
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = beta[i] + beta[j];
      beta[i] -= delta;
      beta[j] += delta;
      if (sum > C) {
        if (beta[i] > C) {
          beta[i] = C;
          beta[j] = sum - C;
        }
      } else if (beta[j] < 0.0) {
        beta[j] = 0.0;
        beta[i] = sum;
      }
      if (sum > C) {
        if (beta[j] > C) {
          beta[j] = C;
          beta[i] = sum - C;
        }
      } else if (beta[i] < 0.0) {
        beta[i] = 0.0;
        beta[j] = sum;
      }
    }
    const double di = beta[i] - old_i, dj = beta[j] - old_j;
    for (std::size_t t = 0; t < m; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
  }

  // Offset from the free variables, else the midpoint of the feasible range.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < m; ++t) {
    const double yg = sign(t) * grad[t];
    if (at_upper(t)) {
      if (sign(t) < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (sign(t) > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  res.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  res.beta = std::move(beta);
  return res;
}

double population_variance(const Matrix& X) {
  const auto& v = X.data();
  double mean = 0.0;
  for (double e : v) mean += e;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double e : v) ss += (e - mean) * (e - mean);
  return ss / static_cast<double>(v.size());
}

}  // namespace

TrainedModel fit_svr(const Matrix& X, std::span<const double> y, const SvrConfig& cfg,
                     std::vector<std::string> names) {
  validate(cfg);
  detail::check_xy(X, y, 1, "fit_svr");
  names = detail::resolve_names(std::move(names), X.cols());
  const std::size_t n = X.rows();

  SvrParams p;
  p.gamma = cfg.gamma;
  if (cfg.gamma_scale) {
    const double var = population_variance(X);
    p.gamma = var > 0.0 ? 1.0 / (static_cast<double>(X.cols()) * var) : 1.0;
  }

  Matrix K(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) K(i, j) = K(j, i) = rbf_kernel(X.row(i), X.row(j), p.gamma);

  auto res = solve_smo(K, y, cfg.c, cfg.epsilon, cfg.tol, cfg.max_passes);
  if (!res.converged)
    throw Error(ErrorKind::NoConvergence, "SVR stopped after " + std::to_string(res.iterations) +
                                              " updates with KKT violation " + std::to_string(res.violation));
  p.iterations = res.iterations;
  p.kkt_violation = res.violation;
  p.bias = -res.rho;
  p.alpha.assign(res.beta.begin(), res.beta.begin() + static_cast<std::ptrdiff_t>(n));
  p.alpha_star.assign(res.beta.begin() + static_cast<std::ptrdiff_t>(n), res.beta.end());
  p.dual_objective = svr_dual_objective(K, y, p.alpha, p.alpha_star, cfg.epsilon);

  std::vector<std::size_t> sv;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = p.alpha[i] - p.alpha_star[i];
    if (d != 0.0) {
      sv.push_back(i);
      p.dual_coef.push_back(d);
    }
  }
  p.support = X.select_rows(sv);
  return {cfg, std::move(names), std::move(p), std::nullopt};
}

}  // namespace ovicast
