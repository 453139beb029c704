#include "critline/fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "critline/error.hpp"

namespace critline {

FitResult fit_exponent(const std::vector<std::pair<double, double>>& points, int min_points) {
  if (static_cast<int>(points.size()) < min_points)
    throw InvalidData("exponent fit needs at least " + std::to_string(min_points) + " points, got " +
                      std::to_string(points.size()));
  double sx = 0, sy = 0;
  FitResult fit;
  fit.k_min = points.front().first;
  fit.k_max = points.front().first;
  for (const auto& [k, v] : points) {
    if (!(k > 0) || !(v > 0) || !std::isfinite(v))
      throw InvalidData("exponent fit needs positive finite data, got (" + std::to_string(k) + ", " +
                        std::to_string(v) + ")");
    sx += std::log(k);
    sy += std::log(v);
    fit.k_min = std::min(fit.k_min, k);
    fit.k_max = std::max(fit.k_max, k);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [k, v] : points) {
    const double dx = std::log(k) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  if (sxx == 0.0) throw InvalidData("exponent fit needs at least two distinct K");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.count = static_cast<int>(points.size());
  for (const auto& [k, v] : points)
    fit.residual_max = std::max(fit.residual_max, std::abs(std::log(v) - fit.intercept - fit.slope * std::log(k)));
  return fit;
}

}  // namespace critline
