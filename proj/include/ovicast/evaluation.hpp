#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ovicast/features.hpp"
#include "ovicast/models.hpp"
#include "ovicast/splits.hpp"

namespace ovicast {

/// Scoring function for cross-validation folds: (observed, predicted) -> score.
using ScoreFn = std::function<double(std::span<const double>, std::span<const double>)>;

double mse(std::span<const double> observed, std::span<const double> predicted);

/// Pearson r, or NaN when either side is constant (e.g. a flat tree output).
double correlation_or_nan(std::span<const double> observed, std::span<const double> predicted);

struct CvReport {
  Vector fold_scores;
  double mean_score = 0.0;
  double sd_score = 0.0;  ///< divisor n-1
};

/// Walk-forward cross-validation: a fresh model per fold, scored on the
/// fold's validation block. Folds run concurrently; results are reduced in
/// fold order.
CvReport cross_validate(const ModelConfig& cfg, const Matrix& X, std::span<const double> y, std::size_t k,
                        const ScoreFn& score = mse);
CvReport cross_validate(const ModelConfig& cfg, const FeatureMatrix& fm, std::size_t k,
                        const ScoreFn& score = mse);

struct ModelMetrics {
  double corr_full = 0.0;     ///< Corr11: all rows, training period included
  double mse_full = 0.0;      ///< MSE
  double corr_holdout = 0.0;  ///< CorrL20
  double mse_holdout = 0.0;   ///< MSEL20
  CvReport cv;                ///< over the training portion only
};

/// Metrics of an already trained model whose training rows are split.train_idx.
ModelMetrics evaluate_trained(const TrainedModel& model, const Matrix& X, std::span<const double> y,
                              const SplitPlan& split, std::size_t k, const ScoreFn& score = mse);

ModelMetrics evaluate_holdout(const ModelConfig& cfg, const FeatureMatrix& fm, double train_fraction,
                              std::size_t k, const ScoreFn& score = mse);

struct SummaryRow {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Quantiles by linear interpolation at zero-based position p * (n - 1).
double quantile(std::span<const double> sorted, double p);
SummaryRow summarize(std::span<const double> values);

struct Histogram {
  Vector edges;  ///< bins + 1 edges; bins are left-closed, the last right-closed
  std::vector<std::size_t> counts;
};

struct ResidualStats {
  Histogram histogram;
  SummaryRow five_number;
  Vector residuals;  ///< observed - predicted
};

Histogram histogram(std::span<const double> values, std::size_t bins);
ResidualStats residual_stats(std::span<const double> observed, std::span<const double> predicted,
                             std::size_t bins);

// ---------------------------------------------------------------------------
// Comparison report.

struct ModelReport {
  std::string name;
  ModelMetrics metrics;
  Vector predictions;  ///< one per row, training and holdout
  SummaryRow summary;
  ResidualStats residuals;
};

struct EvaluationReport {
  std::vector<std::string> weeks;
  Vector observed;
  SummaryRow observed_summary;
  std::size_t train_size = 0;
  double train_fraction = 0.8;
  std::size_t cv_folds = 5;
  std::vector<ModelReport> models;
};

inline constexpr std::size_t kResidualBins = 20;

EvaluationReport build_report(const FeatureMatrix& fm, const std::vector<TrainedModel>& models,
                              double train_fraction, std::size_t cv_folds);

nlohmann::json report_to_json(const EvaluationReport& r);
/// Aligned table: model, Corr11, MSE, Mean Score, SD of Score, CorrL20, MSEL20.
std::string report_to_text(const EvaluationReport& r);
/// One row per series (Observed, then each model): Min, q1, median, Mean, q3, Max.
std::string summary_to_csv(const EvaluationReport& r);

}  // namespace ovicast
