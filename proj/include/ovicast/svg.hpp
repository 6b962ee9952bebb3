#pragma once

#include <span>
#include <string>
#include <vector>

#include "ovicast/evaluation.hpp"

namespace ovicast {

/// Observed and fitted curves over time; rows from `train_size` on are shaded
/// as the holdout period.
std::string svg_fit_plot(const std::string& title, std::span<const double> observed,
                         std::span<const double> fitted, std::size_t train_size);

struct NamedSeries {
  std::string name;
  Vector values;
};

/// Observed (x) against each model's predictions (y), with a 1:1 line.
std::string svg_scatter(std::span<const double> observed, const std::vector<NamedSeries>& predicted);

struct NamedHistogram {
  std::string name;
  Histogram histogram;
};

std::string svg_residual_histograms(const std::vector<NamedHistogram>& panels);

struct NamedSummary {
  std::string name;
  SummaryRow summary;
};

/// Box from q1 to q3, median bar, whiskers to min and max.
std::string svg_residual_boxplots(const std::vector<NamedSummary>& boxes);

}  // namespace ovicast
