#include "critline/bumps.hpp"

#include <mutex>

namespace critline {

namespace {

double smooth_h(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

constexpr double pi = 3.14159265358979323846;

/// Projection onto the first axis: the radial profile integrated over the
/// remaining coordinates. Its 1-D inverse transform is the radial profile
/// of the n-D inverse transform along an axis (Fourier slice).
double projection(const std::function<double(double)>& profile, int dim, double support, double xi1) {
  const double a = std::abs(xi1);
  if (a >= support) return 0.0;
  if (dim == 1) return profile(a);
  // Trapezoid rule over the chord; the integrand is flat at both ends.
  const double half = std::sqrt(support * support - a * a);
  constexpr int nodes = 2048;
  const double step = 2.0 * half / nodes;
  double acc = 0.0;
  for (int i = 1; i < nodes; ++i) {
    const double t = -half + i * step;
    acc += profile(std::hypot(a, t));
  }
  return acc * step;
}

}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = smooth_h(t);
  const double b = smooth_h(1.0 - t);
  return a / (a + b);
}

double psi_profile(double r) {
  const double u = 4.0 * r * r;
  if (u >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u));
}

double phi_lp_profile(double r) {
  auto u = [](double t) { return smooth_step(2.0 * t - 1.0); };
  return u(r) - u(0.5 * r);
}

double phi_test_profile(double r) { return 1.0 - smooth_step(r - 2.0); }

double besov_cutoff_profile(int k, double r) {
  if (k < 0) throw InvalidArgument("besov_cutoff needs k >= 0");
  auto phi0 = [](double t) { return 1.0 - smooth_step(2.0 * t - 2.0); };
  if (k == 0) return phi0(r);
  return phi0(std::ldexp(r, -k)) - phi0(std::ldexp(r, 1 - k));
}

BumpTable BumpTable::build(std::string name, int dim, std::function<double(double)> profile,
                           double support_radius, Options options) {
  if (dim != 1 && dim != 2) throw UnsupportedDimension(dim);
  // Frequency box of half-width 1/(2 spacing) gives the requested table step;
  // the 2^-10 frequency step keeps the trapezoid rule across the support
  // spectrally accurate and the periodic image 2^9 away.
  const double freq_half_width = 0.5 / options.spacing;
  if (freq_half_width < support_radius)
    throw InvalidArgument("table spacing too coarse for the bump support");
  const double freq_step = 1.0 / 1024.0;
  Index points = 8;
  while (2.0 * freq_half_width / static_cast<double>(points) > freq_step) points *= 2;
  const Grid freq(1, freq_half_width, points);

  ComplexArray proj(points), deriv(points);
  for (Index j = 0; j < points; ++j) {
    const double xi = freq.coord(j);
    const double v = projection(profile, dim, support_radius, xi);
    proj(j) = v;
    deriv(j) = std::complex<double>(0.0, 2.0 * pi * xi * v);
  }
  const SampledField value_field = fourier_inverse(SampledField(freq, std::move(proj), Variable::frequency));
  const SampledField slope_field = fourier_inverse(SampledField(freq, std::move(deriv), Variable::frequency));

  BumpTable table;
  table.name_ = std::move(name);
  table.dim_ = dim;
  table.profile_ = std::move(profile);
  table.support_radius_ = support_radius;
  table.spacing_ = value_field.grid().spacing();

  const Index origin = points / 2;  // x = 0 on the dual grid
  const std::size_t half = static_cast<std::size_t>(points - origin);
  std::vector<double> values(half), slopes(half);
  for (std::size_t i = 0; i < half; ++i) {
    values[i] = value_field.values()(origin + static_cast<Index>(i)).real();
    slopes[i] = slope_field.values()(origin + static_cast<Index>(i)).real();
  }
  // Running maximum from the outside, widened to cover each interpolation cell.
  std::vector<double> env(half);
  double running = 0.0;
  for (std::size_t i = half; i-- > 0;) {
    const double cell = std::abs(values[i]) + 0.25 * table.spacing_ * std::abs(slopes[i]);
    running = std::max(running, cell);
    env[i] = running;
  }
  std::size_t cut = half;
  for (std::size_t i = 0; i < half; ++i) {
    if (env[i] < options.cutoff) {
      cut = i;
      break;
    }
  }
  if (cut + 2 >= half)
    throw ConstructionFailure("inverse transform of '" + table.name_ +
                              "' does not decay below the cutoff inside the table");
  values.resize(cut + 2);
  slopes.resize(cut + 2);
  env.resize(cut + 2);
  table.values_ = std::move(values);
  table.slopes_ = std::move(slopes);
  table.envelope_ = std::move(env);
  table.range_ = static_cast<double>(cut) * table.spacing_;
  return table;
}

SampledField BumpTable::tabulated() const {
  // Symmetric power-of-two grid covering the tabulated range.
  Index points = 8;
  while (static_cast<double>(points) * spacing_ < 2.0 * range_) points *= 2;
  const Grid grid(dim_, 0.5 * static_cast<double>(points) * spacing_, points);
  return SampledField::sample(grid, Variable::space,
                              [&](const Point& x) { return inverse_radial(x.norm()); });
}

const BumpTable& psi_table(int dim) {
  if (dim != 1 && dim != 2) throw UnsupportedDimension(dim);
  static std::once_flag flags[2];
  static std::optional<BumpTable> tables[2];
  std::call_once(flags[dim - 1], [dim] {
    tables[dim - 1] = BumpTable::build("psi", dim, psi_profile, 0.5, BumpTable::Options{});
  });
  return *tables[dim - 1];
}

const BumpTable& phi_test_table(int dim) {
  if (dim != 1 && dim != 2) throw UnsupportedDimension(dim);
  static std::once_flag flags[2];
  static std::optional<BumpTable> tables[2];
  std::call_once(flags[dim - 1], [dim] {
    // phi_test has bandwidth 3, so it needs a finer step than psi for the
    // same interpolation accuracy.
    BumpTable::Options opts;
    opts.spacing = 1.0 / 1024.0;
    tables[dim - 1] = BumpTable::build("phi_test", dim, phi_test_profile, 3.0, opts);
  });
  return *tables[dim - 1];
}

Annulus find_annulus(const BumpTable& table) {
  const double center = std::abs(table.inverse_radial(0.0));
  const double threshold = annulus_threshold_fraction * center;
  for (int j = 0; j <= 12; ++j) {
    const double A = std::ldexp(1.0, -j);
    // Sample finer than both the annulus width and the table step.
    const double step = std::min(A / 256.0, table.spacing() / 4.0);
    double lowest = std::numeric_limits<double>::infinity();
    for (double r = A; r < 2.0 * A; r += step) lowest = std::min(lowest, std::abs(table.inverse_radial(r)));
    if (lowest >= threshold) return {A, lowest, threshold};
  }
  throw ConstructionFailure("no annulus A in [2^-12, 1] where F^{-1}" + table.name() + " stays away from 0");
}

}  // namespace critline
