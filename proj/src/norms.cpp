#include "critline/norms.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "critline/bumps.hpp"
#include "critline/parallel.hpp"

namespace critline {

namespace {

constexpr double pi = 3.14159265358979323846;
constexpr double phi_lp_feature = 0.5;  // transition width of the partition bump

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

std::vector<std::vector<int>> multi_indices(int dim, int max_order) {
  std::vector<std::vector<int>> out;
  for (int order = 0; order <= max_order; ++order) {
    if (dim == 1) {
      out.push_back({order});
    } else {
      for (int a = order; a >= 0; --a) out.push_back({a, order - a});
    }
  }
  return out;
}

int order_of(const std::vector<int>& alpha) {
  int o = 0;
  for (int a : alpha) o += a;
  return o;
}

/// Central finite difference d^alpha m at xi with step h.
double finite_difference(const Multiplier& m, const Point& xi, const std::vector<int>& alpha, double h) {
  const int a = alpha[0];
  const int b = alpha.size() > 1 ? alpha[1] : 0;
  Point q = xi;
  double acc = 0.0;
  for (int i = 0; i <= a; ++i) {
    for (int j = 0; j <= b; ++j) {
      q(0) = xi(0) + (0.5 * a - i) * h;
      if (xi.size() > 1) q(1) = xi(1) + (0.5 * b - j) * h;
      const double w = ((i + j) % 2 == 0 ? 1.0 : -1.0) * binomial(a, i) * binomial(b, j);
      acc += w * m(q);
    }
  }
  return acc / std::pow(h, a + b);
}

double auto_step(const Multiplier& m, double lo, double hi, double cap) {
  const double feature = m.feature_scale(lo, hi);
  return std::isfinite(feature) ? std::min(feature / 8.0, cap) : cap;
}

}  // namespace

void SmoothnessParams::validate() const {
  if (!(s > 0) || !std::isfinite(s)) throw InvalidArgument("smoothness s must be positive");
  if (!(r > 1) || !std::isfinite(r)) throw InvalidExponent("integrability r must be > 1 and finite");
  if (r2 && !(*r2 >= 1)) throw InvalidExponent("second Lorentz exponent must be >= 1");
}

SampledField bessel_potential(const SampledField& field, double s) {
  if (s == 0.0) return field;
  return apply_radial_symbol(field, [s](double w) { return std::pow(1.0 + 4.0 * pi * pi * w * w, 0.5 * s); });
}

SampledField riesz_potential(const SampledField& field, double s) {
  if (!(s > 0)) throw InvalidExponent("riesz_potential needs s > 0");
  return apply_radial_symbol(field, [s](double w) { return w == 0.0 ? 0.0 : std::pow(2.0 * pi * w, s); });
}

double sobolev_norm(const SampledField& field, const SmoothnessParams& params) {
  return lp_norm(bessel_potential(field, params.s), params.r);
}

std::pair<double, Index> dyadic_norm_grid(const Multiplier& m, int D, const NormGridOptions& options) {
  const double scale = std::ldexp(1.0, D);
  const double feature = std::min(m.feature_scale(0.5 * scale, 2.0 * scale) / scale, phi_lp_feature);
  double target = feature / 8.0;
  target = std::ldexp(1.0, static_cast<int>(std::floor(std::log2(target))) - options.refine);
  Index points = 8;
  while (2.0 * options.half_width / static_cast<double>(points) > target) {
    points *= 2;
    if (points > (Index(1) << 40)) break;
  }
  const Index total = m.dim == 1 ? points : points * points;
  if (total > options.max_points)
    throw ResolutionError("multiplier norm at D = " + std::to_string(D) + " needs " + std::to_string(total) +
                          " samples, budget is " + std::to_string(options.max_points));
  return {2.0 * options.half_width / static_cast<double>(points), points};
}

std::vector<HormanderNorm> hormander_multiplier_norms(const Multiplier& m, double s, std::span<const double> rs,
                                                      DRange range, const NormGridOptions& options) {
  if (range.hi < range.lo) throw InvalidRange("empty D range");
  for (double r : rs) SmoothnessParams{s, r, std::nullopt}.validate();
  const std::size_t count = static_cast<std::size_t>(range.hi - range.lo + 1);
  // Resolution errors surface before any heavy work.
  std::vector<std::pair<double, Index>> grids(count);
  for (std::size_t i = 0; i < count; ++i) grids[i] = dyadic_norm_grid(m, range.lo + static_cast<int>(i), options);

  std::vector<std::vector<double>> values(count, std::vector<double>(rs.size()));
  parallel_for(count, [&](std::size_t i) {
    const int D = range.lo + static_cast<int>(i);
    const double scale = std::ldexp(1.0, D);
    const Grid grid(m.dim, options.half_width, grids[i].second);
    Point dilated(m.dim);
    const SampledField localized = SampledField::sample(grid, Variable::frequency, [&](const Point& xi) {
      const double cut = phi_lp(xi);
      if (cut == 0.0) return 0.0;
      dilated = scale * xi;
      return cut * m(dilated);
    });
    const SampledField image = bessel_potential(localized, s);
    for (std::size_t j = 0; j < rs.size(); ++j) values[i][j] = lp_norm(image, rs[j]);
  });

  std::vector<HormanderNorm> out(rs.size());
  for (std::size_t j = 0; j < rs.size(); ++j) {
    HormanderNorm& h = out[j];
    h.s = s;
    h.r = rs[j];
    h.value = -1.0;
    for (std::size_t i = 0; i < count; ++i) {
      const int D = range.lo + static_cast<int>(i);
      h.table.push_back({D, values[i][j], grids[i].first, grids[i].second});
      if (values[i][j] > h.value) {
        h.value = values[i][j];
        h.argmax_D = D;
      }
    }
  }
  return out;
}

HormanderNorm hormander_multiplier_norm(const Multiplier& m, const SmoothnessParams& params, DRange range,
                                        const NormGridOptions& options) {
  params.validate();
  const double r = params.r;
  return hormander_multiplier_norms(m, params.s, std::span<const double>(&r, 1), range, options).front();
}

std::vector<DerivativeBound> mikhlin_check(const Multiplier& m, int max_order, const MikhlinOptions& options) {
  if (max_order < 0) throw InvalidArgument("max_order must be >= 0");
  if (!(options.xi_min > 0) || !(options.xi_max > options.xi_min) || options.samples < 2)
    throw InvalidRange("Mikhlin sample range must satisfy 0 < xi_min < xi_max with >= 2 samples");
  const auto alphas = multi_indices(m.dim, max_order);
  std::vector<DerivativeBound> out;
  for (const auto& alpha : alphas) out.push_back({alpha, 0.0, 0.0, 0.0});

  const double golden = pi * (3.0 - std::sqrt(5.0));
  const double log_ratio = std::log(options.xi_max / options.xi_min);
  Point xi(m.dim);
  for (int i = 0; i < options.samples; ++i) {
    const double r = options.xi_min * std::exp(log_ratio * i / (options.samples - 1));
    const double h = options.step > 0 ? options.step : auto_step(m, 0.9 * r, 1.1 * r, r / 16.0);
    // Both half-lines in 1-D; a golden-angle spiral of directions in 2-D.
    const int directions = m.dim == 1 ? 2 : 1;
    for (int d = 0; d < directions; ++d) {
      if (m.dim == 1) {
        xi(0) = d == 0 ? r : -r;
      } else {
        xi(0) = r * std::cos(golden * i);
        xi(1) = r * std::sin(golden * i);
      }
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        const double raw = std::abs(finite_difference(m, xi, alphas[a], h));
        const double weighted = std::pow(r, order_of(alphas[a])) * raw;
        out[a].raw_sup = std::max(out[a].raw_sup, raw);
        if (weighted > out[a].weighted_sup) {
          out[a].weighted_sup = weighted;
          out[a].argsup_radius = r;
        }
      }
    }
  }
  return out;
}

std::vector<AnnulusIntegrals> hormander1960_check(const Multiplier& m, int max_order, std::span<const double> radii,
                                                  const Hormander1960Options& options) {
  if (max_order < 0) throw InvalidArgument("max_order must be >= 0");
  const auto alphas = multi_indices(m.dim, max_order);
  std::vector<AnnulusIntegrals> out;
  for (const auto& alpha : alphas) out.push_back({alpha, {}, {}, 0.0});

  for (double R : radii) {
    if (!(R > 0)) throw InvalidRange("annulus radius must be positive");
    const double h = options.step > 0 ? options.step : auto_step(m, R, 2.0 * R, R / 64.0);
    std::vector<double> integrals(alphas.size(), 0.0);
    Point xi(m.dim);
    if (m.dim == 1) {
      const Index nodes = static_cast<Index>(std::ceil(R / h));
      if (2 * nodes > options.max_nodes) throw ResolutionError("annulus R = " + std::to_string(R) + " exceeds budget");
      const double dr = R / static_cast<double>(nodes);
      for (int side : {1, -1}) {
        for (Index i = 0; i < nodes; ++i) {
          xi(0) = side * (R + (static_cast<double>(i) + 0.5) * dr);
          for (std::size_t a = 0; a < alphas.size(); ++a) {
            const double d = finite_difference(m, xi, alphas[a], h);
            integrals[a] += d * d * dr;
          }
        }
      }
    } else {
      const Index radial = static_cast<Index>(std::ceil(R / h));
      const Index angular = static_cast<Index>(std::ceil(4.0 * pi * R / h));
      if (radial * angular > options.max_nodes)
        throw ResolutionError("annulus R = " + std::to_string(R) + " exceeds budget");
      const double dr = R / static_cast<double>(radial);
      const double dt = 2.0 * pi / static_cast<double>(angular);
      for (Index i = 0; i < radial; ++i) {
        const double r = R + (static_cast<double>(i) + 0.5) * dr;
        for (Index j = 0; j < angular; ++j) {
          const double t = (static_cast<double>(j) + 0.5) * dt;
          xi(0) = r * std::cos(t);
          xi(1) = r * std::sin(t);
          for (std::size_t a = 0; a < alphas.size(); ++a) {
            const double d = finite_difference(m, xi, alphas[a], h);
            integrals[a] += d * d * r * dr * dt;
          }
        }
      }
    }
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const double weight = std::pow(R, -m.dim + 2 * order_of(alphas[a]));
      const double v = weight * integrals[a];
      out[a].radii.push_back(R);
      out[a].values.push_back(v);
      out[a].sup = std::max(out[a].sup, v);
    }
  }
  return out;
}

BesovNorm besov_norm(const SampledField& field, const SmoothnessParams& params, int k_max) {
  params.validate();
  if (k_max < 0) throw InvalidRange("k_max must be >= 0");
  const Grid& grid = field.grid();
  const Grid dual = grid.dual();
  const ComplexArray spectrum = detail::scaled_transform(grid, field.values(), false);
  const double total = pairwise_sum(0, spectrum.size(), [&](Index i) { return std::norm(spectrum(i)); });

  BesovNorm out;
  for (int k = 0; k <= k_max; ++k) {
    ComplexArray piece(spectrum.size());
    for (Index i = 0; i < spectrum.size(); ++i) piece(i) = spectrum(i) * besov_cutoff_profile(k, dual.radius(i));
    if (k == k_max && total > 0) {
      const double mass = pairwise_sum(0, piece.size(), [&](Index i) { return std::norm(piece(i)); });
      out.top_piece_mass = mass / total;
    }
    const SampledField back(grid, detail::scaled_transform(dual, std::move(piece), true), field.variable());
    const double term = std::pow(2.0, k * params.s) * lp_norm(back, params.r);
    out.pieces.push_back(term);
    out.value += term;
  }
  out.truncation_warning = out.top_piece_mass > besov_truncation_tolerance;
  return out;
}

double lorentz_norm(const SampledField& field, double r1, double r2) {
  if (!(r1 > 1) || !std::isfinite(r1)) throw InvalidExponent("Lorentz r1 must lie in (1, infinity)");
  if (!(r2 >= 1)) throw InvalidExponent("Lorentz r2 must lie in [1, infinity]");
  const Rearrangement g = rearrangement(field);
  if (std::isinf(r2)) {
    double sup = 0.0, t = 0.0;
    for (const auto& step : g.steps) {
      t += step.measure;
      sup = std::max(sup, std::pow(t, 1.0 / r1) * step.level);
    }
    return sup;
  }
  const double q = r2 / r1;
  std::vector<double> terms(g.steps.size());
  double left = 0.0;
  for (std::size_t i = 0; i < g.steps.size(); ++i) {
    const auto& step = g.steps[i];
    const double right = left + step.measure;
    // int_left^right t^{q-1} dt, exact per step.
    const double weight = q == 1.0 ? step.measure : (std::pow(right, q) - std::pow(left, q)) / q;
    terms[i] = std::pow(step.level, r2) * weight;
    left = right;
  }
  return std::pow(pairwise_sum(terms), 1.0 / r2);
}

double lorentz_sobolev_norm(const SampledField& field, double s, double r1, double r2) {
  return lorentz_norm(bessel_potential(field, s), r1, r2);
}

FitResult tail_decay_fit(const SampledField& field, double lo, double hi) {
  std::vector<std::pair<double, double>> points;
  for (Index i = 0; i < field.grid().size(); ++i) {
    const double r = field.grid().radius(i);
    const double v = std::abs(field.values()(i));
    if (r >= lo && r <= hi && v > 0) points.emplace_back(r, v);
  }
  return fit_exponent(points);
}

}  // namespace critline
