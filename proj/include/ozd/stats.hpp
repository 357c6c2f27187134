#pragma once

#include <span>
#include <vector>

namespace ozd::stats {

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1); zero for fewer than two values.
double stddev(std::span<const double> values);
double median(std::span<const double> values);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

/// Pearson goodness-of-fit of observed counts against category probabilities.
ChiSquareResult chi_square_gof(std::span<const long long> counts, std::span<const double> probs);

}  // namespace ozd::stats
