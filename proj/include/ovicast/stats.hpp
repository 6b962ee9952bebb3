#pragma once

#include <span>

namespace ovicast {

/// Regularized incomplete beta I_x(a, b), continued fraction evaluated with
/// the modified Lentz method to relative precision 1e-12.
double regularized_incomplete_beta(double x, double a, double b);

/// Two-sided p-value of Student's t statistic with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct Correlation {
  double r = 0.0;
  double p = 1.0;
};

/// Sample Pearson correlation. Throws LengthMismatch or ConstantInput.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson r and its two-sided p-value from the t transform with n-2 degrees
/// of freedom. Needs n >= 3; |r| == 1 gives p == 0.
Correlation pearson_with_pvalue(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);
/// Sample standard deviation, divisor n-1.
double sample_sd(std::span<const double> v);

}  // namespace ovicast
