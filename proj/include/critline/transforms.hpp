#pragma once

// Uniform origin-centered grids, sampled fields, the continuum Fourier
// transform f^(w) = int f(x) exp(-2 pi i x.w) dx approximated by a scaled DFT,
// quadrature L^p norms and the nonincreasing rearrangement.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "critline/detail/fft.hpp"
#include "critline/error.hpp"

namespace critline {

using Index = Eigen::Index;

/// A point in R^n, n <= 2, stored inline.
template <typename Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;
using Point = PointT<double>;

inline Point make_point(double x) { Point p(1); p << x; return p; }
inline Point make_point(double x, double y) { Point p(2); p << x, y; return p; }

enum class Variable : std::int32_t { space = 0, frequency = 1 };

inline Variable dual_of(Variable v) {
  return v == Variable::space ? Variable::frequency : Variable::space;
}

inline bool is_power_of_two(Index v) { return v > 0 && (v & (v - 1)) == 0; }

/// Sample lattice {-L + j h : 0 <= j < P}^n with h = 2L / P.
template <typename Scalar>
class BasicGrid {
 public:
  BasicGrid(int dim, Scalar half_width, Index points_per_axis)
      : dim_(dim), half_width_(half_width), points_(points_per_axis) {
    if (dim != 1 && dim != 2) throw UnsupportedDimension(dim);
    if (!(half_width > 0) || !std::isfinite(static_cast<double>(half_width)))
      throw InvalidArgument("grid half-width must be positive and finite");
    if (points_per_axis < 8 || !is_power_of_two(points_per_axis))
      throw InvalidArgument("points_per_axis must be a power of two >= 8, got " +
                            std::to_string(points_per_axis));
  }

  int dim() const { return dim_; }
  Scalar half_width() const { return half_width_; }
  Index points_per_axis() const { return points_; }
  Scalar spacing() const { return Scalar(2) * half_width_ / Scalar(points_); }
  Index size() const { return dim_ == 1 ? points_ : points_ * points_; }
  /// Measure h^n carried by each sample.
  Scalar cell_measure() const {
    const Scalar h = spacing();
    return dim_ == 1 ? h : h * h;
  }

  Scalar coord(Index j) const { return -half_width_ + Scalar(j) * spacing(); }

  /// Coordinates of the sample with row-major flat index `flat`.
  PointT<Scalar> point(Index flat) const {
    PointT<Scalar> p(dim_);
    if (dim_ == 1) {
      p(0) = coord(flat);
    } else {
      p(0) = coord(flat / points_);
      p(1) = coord(flat % points_);
    }
    return p;
  }

  Scalar radius(Index flat) const {
    if (dim_ == 1) return std::abs(coord(flat));
    return std::hypot(coord(flat / points_), coord(flat % points_));
  }

  /// Grid on which the DFT of a field on this grid lives: half-width 1/(2h),
  /// spacing 1/(2L), same point count.
  BasicGrid dual() const { return BasicGrid(dim_, Scalar(1) / (Scalar(2) * spacing()), points_); }

  bool operator==(const BasicGrid& o) const {
    return dim_ == o.dim_ && points_ == o.points_ && half_width_ == o.half_width_;
  }
  bool operator!=(const BasicGrid& o) const { return !(*this == o); }

 private:
  int dim_;
  Scalar half_width_;
  Index points_;
};

/// Complex samples of a function of the space or frequency variable.
template <typename Scalar>
class BasicSampledField {
 public:
  using Complex = std::complex<Scalar>;
  using Values = Eigen::Array<Complex, Eigen::Dynamic, 1>;

  BasicSampledField(BasicGrid<Scalar> grid, Values values, Variable variable)
      : grid_(std::move(grid)), values_(std::move(values)), variable_(variable) {
    if (values_.size() != grid_.size())
      throw InvalidArgument("field has " + std::to_string(values_.size()) +
                            " values, grid expects " + std::to_string(grid_.size()));
    if (!values_.isFinite().all()) throw InvalidData("field values must be finite");
  }

  /// Samples fn(point) at every grid point.
  template <typename Fn>
  static BasicSampledField sample(const BasicGrid<Scalar>& grid, Variable variable, Fn&& fn) {
    Values v(grid.size());
    for (Index i = 0; i < grid.size(); ++i) v(i) = Complex(fn(grid.point(i)));
    return BasicSampledField(grid, std::move(v), variable);
  }

  const BasicGrid<Scalar>& grid() const { return grid_; }
  const Values& values() const { return values_; }
  Variable variable() const { return variable_; }
  int dim() const { return grid_.dim(); }

 private:
  BasicGrid<Scalar> grid_;
  Values values_;
  Variable variable_;
};

using Grid = BasicGrid<double>;
using SampledField = BasicSampledField<double>;
using ComplexArray = SampledField::Values;

// ---------------------------------------------------------------------------
// Reductions

/// Pairwise sum of term(i) for i in [begin, end). The recursion order is a
/// pure function of the range, so results do not depend on threading.
template <typename Term>
double pairwise_sum(Index begin, Index end, const Term& term) {
  const Index n = end - begin;
  if (n <= 128) {
    double acc = 0.0;
    for (Index i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const Index mid = begin + n / 2;
  return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

inline double pairwise_sum(std::span<const double> values) {
  return pairwise_sum(0, static_cast<Index>(values.size()),
                      [&](Index i) { return values[static_cast<std::size_t>(i)]; });
}

// ---------------------------------------------------------------------------
// Fourier transforms

namespace detail {

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// (-1)^(sum of indices) checkerboard applied in place.
template <typename Scalar>
void apply_checkerboard(Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1>& v, int dim, Index points) {
  if (dim == 1) {
    for (Index j = 1; j < points; j += 2) v(j) = -v(j);
  } else {
    for (Index r = 0; r < points; ++r)
      for (Index c = (r % 2 == 0) ? 1 : 0; c < points; c += 2) v(r * points + c) = -v(r * points + c);
  }
}

/// Unnormalized DFT with kernel exp(sign * 2 pi i j.m / P), in place.
template <typename Scalar>
void raw_dft(Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1>& v, int dim, Index points, bool inverse) {
  ensure_fft_thread_safety();
  Eigen::FFT<Scalar> fft;
  fft.SetFlag(Eigen::FFT<Scalar>::Unscaled);
  Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1> out(v.size());
  if (dim == 1) {
    if (inverse) fft.inv(out.data(), v.data(), points);
    else fft.fwd(out.data(), v.data(), points);
  } else {
    // The 2-D entry points exist only on the backend; they are unscaled.
    if (inverse) fft.impl().inv2(out.data(), v.data(), static_cast<int>(points), static_cast<int>(points));
    else fft.impl().fwd2(out.data(), v.data(), static_cast<int>(points), static_cast<int>(points));
  }
  v.swap(out);
}

/// Continuum-scaled transform of raw sample values on `grid` into values on
/// grid.dual(). `inverse` selects the exp(+2 pi i) kernel.
template <typename Scalar>
Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1> scaled_transform(
    const BasicGrid<Scalar>& grid, Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1> v, bool inverse) {
  const Index P = grid.points_per_axis();
  apply_checkerboard(v, grid.dim(), P);
  raw_dft(v, grid.dim(), P, inverse);
  apply_checkerboard(v, grid.dim(), P);
  v *= grid.cell_measure();
  return v;
}

}  // namespace detail

/// Riemann-sum approximation of the forward transform on the dual grid.
template <typename Scalar>
BasicSampledField<Scalar> fourier_forward(const BasicSampledField<Scalar>& field) {
  if (field.dim() != 1 && field.dim() != 2) throw UnsupportedDimension(field.dim());
  if (field.variable() != Variable::space)
    throw InvalidArgument("fourier_forward expects a space-variable field");
  return BasicSampledField<Scalar>(field.grid().dual(),
                                   detail::scaled_transform(field.grid(), field.values(), false),
                                   Variable::frequency);
}

/// Exact inverse of fourier_forward (kernel exp(+2 pi i x.w)).
template <typename Scalar>
BasicSampledField<Scalar> fourier_inverse(const BasicSampledField<Scalar>& field) {
  if (field.dim() != 1 && field.dim() != 2) throw UnsupportedDimension(field.dim());
  if (field.variable() != Variable::frequency)
    throw InvalidArgument("fourier_inverse expects a frequency-variable field");
  return BasicSampledField<Scalar>(field.grid().dual(),
                                   detail::scaled_transform(field.grid(), field.values(), true),
                                   Variable::space);
}

/// Applies the Fourier multiplier symbol(|w|) to a field, treating the
/// field's own variable as the "space" variable of the operator. The tag of
/// the result equals the tag of the input.
template <typename Scalar, typename Symbol>
BasicSampledField<Scalar> apply_radial_symbol(const BasicSampledField<Scalar>& field, Symbol&& symbol) {
  const BasicGrid<Scalar>& grid = field.grid();
  auto spectrum = detail::scaled_transform(grid, field.values(), false);
  const BasicGrid<Scalar> dual = grid.dual();
  for (Index i = 0; i < dual.size(); ++i) spectrum(i) *= symbol(dual.radius(i));
  return BasicSampledField<Scalar>(grid, detail::scaled_transform(dual, std::move(spectrum), true),
                                   field.variable());
}

// ---------------------------------------------------------------------------
// Norms and rearrangement

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// (sum |v|^p h^n)^(1/p); max |v| for p = infinity.
template <typename Scalar>
double lp_norm(const BasicSampledField<Scalar>& field, double p) {
  if (!(p >= 1.0)) throw InvalidExponent("lp_norm needs p >= 1, got " + std::to_string(p));
  const auto& v = field.values();
  if (std::isinf(p)) return v.size() == 0 ? 0.0 : static_cast<double>(v.abs().maxCoeff());
  double sum;
  if (p == 2.0) {
    sum = pairwise_sum(0, v.size(), [&](Index i) { return static_cast<double>(std::norm(v(i))); });
    return std::sqrt(sum * static_cast<double>(field.grid().cell_measure()));
  }
  sum = pairwise_sum(0, v.size(), [&](Index i) { return std::pow(static_cast<double>(std::abs(v(i))), p); });
  return std::pow(sum * static_cast<double>(field.grid().cell_measure()), 1.0 / p);
}

/// Nonincreasing rearrangement as a right-continuous step function: level
/// steps[i].level on [T_{i-1}, T_i), T_i the running sum of measures. Steps
/// with equal level are merged; g* = 0 past the last step.
struct Rearrangement {
  struct Step {
    double measure;
    double level;
  };
  std::vector<Step> steps;

  double total_measure() const {
    double t = 0.0;
    for (const auto& s : steps) t += s.measure;
    return t;
  }

  /// g*(t) for t >= 0.
  double operator()(double t) const {
    double right = 0.0;
    for (const auto& s : steps) {
      right += s.measure;
      if (t < right) return s.level;
    }
    return 0.0;
  }
};

template <typename Scalar>
Rearrangement rearrangement(const BasicSampledField<Scalar>& field) {
  std::vector<double> levels(static_cast<std::size_t>(field.values().size()));
  for (Index i = 0; i < field.values().size(); ++i)
    levels[static_cast<std::size_t>(i)] = static_cast<double>(std::abs(field.values()(i)));
  std::sort(levels.begin(), levels.end(), std::greater<>());
  const double cell = static_cast<double>(field.grid().cell_measure());
  Rearrangement out;
  std::vector<double> counts;
  for (double level : levels) {
    if (level == 0.0) break;
    if (!out.steps.empty() && out.steps.back().level == level) {
      counts.back() += 1.0;
    } else {
      out.steps.push_back({0.0, level});
      counts.push_back(1.0);
    }
  }
  for (std::size_t i = 0; i < counts.size(); ++i) out.steps[i].measure = counts[i] * cell;
  return out;
}

}  // namespace critline
