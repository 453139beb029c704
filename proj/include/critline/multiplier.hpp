#pragma once

#include <functional>
#include <limits>
#include <string>

#include "critline/transforms.hpp"

namespace critline {

/// A pointwise-evaluable Fourier multiplier m(xi).
struct Multiplier {
  std::string name;
  int dim = 1;
  std::function<double(const Point&)> value;
  /// Finest feature length of m on the radial band lo <= |xi| <= hi, or
  /// +infinity where m is constant. Drives grid spacing and finite
  /// difference steps.
  std::function<double(double lo, double hi)> feature_scale;

  double operator()(const Point& xi) const { return value(xi); }
};

inline Multiplier constant_multiplier(int dim, double c) {
  return {"constant", dim, [c](const Point&) { return c; },
          [](double, double) { return std::numeric_limits<double>::infinity(); }};
}

/// Radial multiplier with a fixed feature length at every radius.
inline Multiplier radial_multiplier(std::string name, int dim, std::function<double(double)> profile,
                                    double feature) {
  return {std::move(name), dim, [profile](const Point& xi) { return profile(xi.norm()); },
          [feature](double, double) { return feature; }};
}

}  // namespace critline
