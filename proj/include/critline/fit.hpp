#pragma once

#include <utility>
#include <vector>

namespace critline {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;   ///< log(value) at log(K) = 0
  double residual_max = 0.0;  ///< max |log value - fitted| over the points
  double k_min = 0.0;
  double k_max = 0.0;
  int count = 0;
};

/// Least-squares line through (log K, log value). Needs at least
/// `min_points` points and strictly positive K and values.
FitResult fit_exponent(const std::vector<std::pair<double, double>>& points, int min_points = 4);

}  // namespace critline
