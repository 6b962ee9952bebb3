#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "ovicast/error.hpp"
#include "ovicast/matrix.hpp"
#include "ovicast/models.hpp"

namespace ovicast {

double mlp_predict_row(const MlpParams& p, std::span<const double> x);
double knn_predict_point(const KnnParams& p, std::size_t k, std::span<const double> z);
double dtr_predict_point(const DtrParams& p, std::span<const double> z);

}  // namespace ovicast

namespace ovicast::detail {

inline std::vector<std::string> resolve_names(std::vector<std::string> names, std::size_t cols) {
  if (names.empty()) {
    for (std::size_t j = 0; j < cols; ++j) names.push_back("x" + std::to_string(j));
  }
  if (names.size() != cols)
    throw Error(ErrorKind::ShapeMismatch,
                std::to_string(names.size()) + " feature names for " + std::to_string(cols) + " columns");
  return names;
}

inline void check_xy(const Matrix& X, std::span<const double> y, std::size_t min_rows, const char* who) {
  if (X.rows() != y.size())
    throw Error(ErrorKind::LengthMismatch, std::string(who) + ": X has " + std::to_string(X.rows()) +
                                               " rows, y has " + std::to_string(y.size()));
  if (X.rows() < min_rows)
    throw Error(ErrorKind::TooFewSamples,
                std::string(who) + " needs at least " + std::to_string(min_rows) + " rows");
}

/// Requested PCA width capped at what the sample supports, min(rows-1, cols).
inline std::size_t usable_components(std::size_t requested, const Matrix& X) {
  if (X.rows() < 2) return 0;
  return std::min({requested, X.rows() - 1, X.cols()});
}

}  // namespace ovicast::detail
