#include "ovicast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ovicast/error.hpp"
#include "ovicast/numfmt.hpp"
#include "ovicast/stats.hpp"

namespace ovicast {

double mse(std::span<const double> observed, std::span<const double> predicted) {
  if (observed.size() != predicted.size())
    throw Error(ErrorKind::LengthMismatch,
                "mse: " + std::to_string(observed.size()) + " vs " + std::to_string(predicted.size()));
  if (observed.empty()) throw Error(ErrorKind::EmptyInput, "mse of empty vectors");
  double s = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - predicted[i];
    s += d * d;
  }
  return s / static_cast<double>(observed.size());
}

double correlation_or_nan(std::span<const double> observed, std::span<const double> predicted) {
  try {
    return pearson(observed, predicted);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConstantInput || e.kind() == ErrorKind::TooFewSamples)
      return std::numeric_limits<double>::quiet_NaN();
    throw;
  }
}

namespace {

CvReport reduce_folds(Vector scores) {
  CvReport r;
  r.fold_scores = std::move(scores);
  r.mean_score = mean(r.fold_scores);
  r.sd_score = sample_sd(r.fold_scores);
  return r;
}

}  // namespace

CvReport cross_validate(const ModelConfig& cfg, const Matrix& X, std::span<const double> y, std::size_t k,
                        const ScoreFn& score) {
  if (X.rows() != y.size()) throw Error(ErrorKind::LengthMismatch, "cross_validate: X and y differ in length");
  const auto folds = time_series_splits(X.rows(), k);
  std::vector<std::future<double>> pending;
  pending.reserve(folds.size());
  for (const auto& fold : folds) {
    pending.push_back(std::async(std::launch::async, [&cfg, &X, y, &fold, &score] {
      const auto model = fit(cfg, X.select_rows(fold.train_idx), select(y, fold.train_idx));
      const auto pred = predict(model, X.select_rows(fold.test_idx));
      return score(select(y, fold.test_idx), pred);
    }));
  }
  Vector scores;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    try {
      scores.push_back(pending[i].get());
    } catch (const Error& e) {
      // Drain the remaining folds before reporting.
      for (std::size_t j = i + 1; j < pending.size(); ++j) {
        try {
          pending[j].get();
        } catch (...) {
        }
      }
      throw Error(e.kind(), "fold " + std::to_string(i + 1) + "/" + std::to_string(folds.size()) + ": " +
                                e.message());
    }
  }
  return reduce_folds(std::move(scores));
}

CvReport cross_validate(const ModelConfig& cfg, const FeatureMatrix& fm, std::size_t k, const ScoreFn& score) {
  return cross_validate(cfg, fm.X, fm.y, k, score);
}

ModelMetrics evaluate_trained(const TrainedModel& model, const Matrix& X, std::span<const double> y,
                              const SplitPlan& split, std::size_t k, const ScoreFn& score) {
  const auto pred = predict(model, X);
  const auto obs_hold = select(y, split.test_idx);
  const auto pred_hold = select(pred, split.test_idx);
  ModelMetrics m;
  m.corr_full = correlation_or_nan(y, pred);
  m.mse_full = mse(y, pred);
  m.corr_holdout = correlation_or_nan(obs_hold, pred_hold);
  m.mse_holdout = mse(obs_hold, pred_hold);
  m.cv = cross_validate(model.config, X.select_rows(split.train_idx), select(y, split.train_idx), k, score);
  return m;
}

ModelMetrics evaluate_holdout(const ModelConfig& cfg, const FeatureMatrix& fm, double train_fraction,
                              std::size_t k, const ScoreFn& score) {
  const auto split = chronological_split(fm.X.rows(), train_fraction);
  const auto model = fit(cfg, fm.X.select_rows(split.train_idx), select(fm.y, split.train_idx), fm.feature_names());
  return evaluate_trained(model, fm.X, fm.y, split, k, score);
}

double quantile(std::span<const double> sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SummaryRow summarize(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "summarize of an empty vector");
  Vector sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  // Sum in sorted order so the mean does not depend on input order.
  double sum = 0.0;
  for (double v : sorted) sum += v;
  return {sorted.front(),
          quantile(sorted, 0.25),
          quantile(sorted, 0.5),
          sum / static_cast<double>(sorted.size()),
          quantile(sorted, 0.75),
          sorted.back()};
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw Error(ErrorKind::Config, "histogram needs at least one bin");
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "histogram of an empty vector");
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  Histogram h;
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(b == bins ? hi : lo + width * static_cast<double>(b));
  h.counts.assign(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>(std::floor((v - lo) / width));
    b = std::min(b, bins - 1);
    ++h.counts[b];
  }
  return h;
}

ResidualStats residual_stats(std::span<const double> observed, std::span<const double> predicted,
                             std::size_t bins) {
  if (observed.size() != predicted.size())
    throw Error(ErrorKind::LengthMismatch, "residual_stats: " + std::to_string(observed.size()) + " vs " +
                                               std::to_string(predicted.size()));
  ResidualStats r;
  for (std::size_t i = 0; i < observed.size(); ++i) r.residuals.push_back(observed[i] - predicted[i]);
  r.histogram = histogram(r.residuals, bins);
  r.five_number = summarize(r.residuals);
  return r;
}

EvaluationReport build_report(const FeatureMatrix& fm, const std::vector<TrainedModel>& models,
                              double train_fraction, std::size_t cv_folds) {
  EvaluationReport r;
  for (const auto& w : fm.rows) r.weeks.push_back(to_string(w));
  r.observed = fm.y;
  r.observed_summary = summarize(fm.y);
  r.train_fraction = train_fraction;
  r.cv_folds = cv_folds;
  const auto split = chronological_split(fm.X.rows(), train_fraction);
  r.train_size = split.train_idx.size();
  for (const auto& m : models) {
    ModelReport mr;
    mr.name = std::string(model_name(m.config));
    mr.metrics = evaluate_trained(m, fm.X, fm.y, split, cv_folds);
    mr.predictions = predict(m, fm.X);
    mr.summary = summarize(mr.predictions);
    mr.residuals = residual_stats(fm.y, mr.predictions, kResidualBins);
    r.models.push_back(std::move(mr));
  }
  return r;
}

namespace {

nlohmann::json real(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

nlohmann::json reals(std::span<const double> v) {
  auto a = nlohmann::json::array();
  for (double e : v) a.push_back(real(e));
  return a;
}

nlohmann::json summary_json(const SummaryRow& s) {
  return {{"min", real(s.min)}, {"q1", real(s.q1)},   {"median", real(s.median)},
          {"mean", real(s.mean)}, {"q3", real(s.q3)}, {"max", real(s.max)}};
}

std::string fixed3(double v) {
  if (!std::isfinite(v)) return "NA";
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  auto s = os.str();
  return s == "-0.000" ? "0.000" : s;
}

}  // namespace

nlohmann::json report_to_json(const EvaluationReport& r) {
  nlohmann::json j;
  j["weeks"] = r.weeks;
  j["observed"] = reals(r.observed);
  j["observed_summary"] = summary_json(r.observed_summary);
  j["train_size"] = r.train_size;
  j["train_fraction"] = r.train_fraction;
  j["cv_folds"] = r.cv_folds;
  j["columns"] = {"model", "Corr11", "MSE", "Mean Score", "SD of Score", "CorrL20", "MSEL20"};
  auto models = nlohmann::json::array();
  for (const auto& m : r.models) {
    nlohmann::json mj;
    mj["name"] = m.name;
    mj["Corr11"] = real(m.metrics.corr_full);
    mj["MSE"] = real(m.metrics.mse_full);
    mj["Mean Score"] = real(m.metrics.cv.mean_score);
    mj["SD of Score"] = real(m.metrics.cv.sd_score);
    mj["CorrL20"] = real(m.metrics.corr_holdout);
    mj["MSEL20"] = real(m.metrics.mse_holdout);
    mj["fold_scores"] = reals(m.metrics.cv.fold_scores);
    mj["predictions"] = reals(m.predictions);
    mj["summary"] = summary_json(m.summary);
    mj["residuals"] = {{"values", reals(m.residuals.residuals)},
                       {"five_number", summary_json(m.residuals.five_number)},
                       {"histogram",
                        {{"edges", reals(m.residuals.histogram.edges)}, {"counts", m.residuals.histogram.counts}}}};
    models.push_back(std::move(mj));
  }
  j["models"] = std::move(models);
  return j;
}

std::string report_to_text(const EvaluationReport& r) {
  const std::vector<std::string> header{"model", "Corr11", "MSE", "Mean Score", "SD of Score", "CorrL20", "MSEL20"};
  std::vector<std::vector<std::string>> rows{header};
  for (const auto& m : r.models) {
    const auto& x = m.metrics;
    rows.push_back({m.name, fixed3(x.corr_full), fixed3(x.mse_full), fixed3(x.cv.mean_score),
                    fixed3(x.cv.sd_score), fixed3(x.corr_holdout), fixed3(x.mse_holdout)});
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0)
        os << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      else
        os << "  " << std::right << std::setw(static_cast<int>(width[c])) << row[c];
    }
    os << '\n';
  }
  return os.str();
}

std::string summary_to_csv(const EvaluationReport& r) {
  std::ostringstream os;
  os << "series,min,q1,median,mean,q3,max\n";
  auto line = [&](const std::string& name, const SummaryRow& s) {
    os << name << ',' << format_double(s.min) << ',' << format_double(s.q1) << ',' << format_double(s.median)
       << ',' << format_double(s.mean) << ',' << format_double(s.q3) << ',' << format_double(s.max) << '\n';
  };
  line("observed", r.observed_summary);
  for (const auto& m : r.models) line(m.name, m.summary);
  return os.str();
}

}  // namespace ovicast
