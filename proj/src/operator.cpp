#include "critline/operator.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "critline/parallel.hpp"

namespace critline {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
// Scale terms below this size are skipped; they are far under the tail tolerance.
constexpr double negligible_term = 1e-17;

// |z|^p computed from |z|^2.
struct PowerOfNorm {
  enum class Kind { generic, square, four_thirds } kind = Kind::generic;
  double half_p = 1.0;

  explicit PowerOfNorm(double p) : half_p(p / 2.0) {
    if (p == 2.0) kind = Kind::square;
    else if (std::abs(p - 4.0 / 3.0) < 1e-15) kind = Kind::four_thirds;
  }

  double operator()(double norm2) const {
    switch (kind) {
      case Kind::square:
        return norm2;
      case Kind::four_thirds: {
        const double c = std::cbrt(norm2);
        return c * c;
      }
      case Kind::generic:
        break;
    }
    return std::pow(norm2, half_p);
  }
};

struct Scale {
  int N = 0;
  double dilation = 1.0;  // 2^N
  double weight = 0.0;    // c_N 2^{-nN}
  std::int64_t count = 0;
  std::vector<LatticePoint> ks;
};

std::vector<Scale> scales(const MultiplierSpec& spec, bool with_indices) {
  spec.validate();
  std::vector<Scale> out;
  for (int N = 1; N <= spec.K; ++N) {
    Scale sc;
    sc.N = N;
    sc.dilation = std::ldexp(1.0, N);
    sc.weight = c_coeff(N, spec.s) * std::ldexp(1.0, -spec.dim * N);
    if (with_indices) {
      sc.ks = index_set(N, spec.dim).ks;
      sc.count = static_cast<std::int64_t>(sc.ks.size());
    } else {
      sc.count = index_set_size(N, spec.dim);
    }
    out.push_back(std::move(sc));
  }
  return out;
}

// Smallest r in [0, hi] with fn(r) <= level, for nonincreasing fn.
template <typename Fn>
double first_below(Fn&& fn, double hi, double level) {
  if (fn(0.0) <= level) return 0.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fn(mid) <= level) hi = mid;
    else lo = mid;
  }
  return hi;
}

// Radius past which scale `sc` contributes less than negligible_term.
double active_radius(const Scale& sc, const BumpTable& table) {
  const double amplitude = sc.weight * static_cast<double>(sc.count);
  if (amplitude == 0.0) return 0.0;
  return sc.dilation * first_below([&](double r) { return amplitude * table.envelope(r); }, table.range(),
                                   negligible_term);
}

double floor_power_of_two(double v) { return std::ldexp(1.0, static_cast<int>(std::floor(std::log2(v)))); }
double ceil_power_of_two(double v) { return std::ldexp(1.0, static_cast<int>(std::ceil(std::log2(v)))); }

bool is_dyadic_spacing(double h) {
  int e = 0;
  return h > 0 && std::frexp(h, &e) == 0.5;
}

void check_pattern(const std::vector<Scale>& sc, const SignPattern& pattern) {
  if (pattern.size() != sc.size()) throw InvalidArgument("sign pattern has the wrong number of scales");
  for (std::size_t i = 0; i < sc.size(); ++i)
    if (static_cast<std::int64_t>(pattern[i].size()) != sc[i].count)
      throw InvalidArgument("sign pattern row " + std::to_string(i + 1) + " does not match |I_N|");
}

// Periodic table S(m) = sum_k a_k exp(2 pi i m.k / period), m in [0, period)^n.
ComplexArray exponential_sum_table(const Scale& sc, const std::vector<std::int8_t>& signs, int dim, Index period) {
  const Index size = dim == 1 ? period : period * period;
  ComplexArray table = ComplexArray::Zero(size);
  const std::int64_t mask = period - 1;
  for (std::size_t i = 0; i < sc.ks.size(); ++i) {
    const auto& k = sc.ks[i];
    const Index at = dim == 1 ? (k[0] & mask) : (k[0] & mask) * period + (k[1] & mask);
    table(at) += static_cast<double>(signs[i]);
  }
  detail::raw_dft(table, dim, period, true);
  return table;
}

// Deterministic parallel sum of chunk(begin, end) over [0, total).
template <typename Chunk>
double chunked_sum(Index total, Index chunk, Chunk&& fn) {
  const Index chunks = (total + chunk - 1) / chunk;
  std::vector<double> partial(static_cast<std::size_t>(chunks));
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    const Index begin = static_cast<Index>(c) * chunk;
    partial[c] = fn(begin, std::min(total, begin + chunk));
  });
  return pairwise_sum(partial);
}

class SquareFunctionEval {
 public:
  explicit SquareFunctionEval(const MultiplierSpec& spec)
      : table_(psi_table(spec.dim)), scales_(scales(spec, false)) {
    for (const auto& sc : scales_) {
      weight2_.push_back(sc.weight * sc.weight * static_cast<double>(sc.count));
      reach_.push_back(active_radius(sc, table_));
    }
  }

  double squared(double r) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < scales_.size(); ++i) {
      if (r >= reach_[i] || weight2_[i] == 0.0) continue;
      const double g = table_.inverse_radial(r / scales_[i].dilation);
      sum += weight2_[i] * g * g;
    }
    return sum;
  }

  double scale_term(std::size_t i, double r) const {
    const double g = table_.inverse_radial(r / scales_[i].dilation);
    return weight2_[i] * g * g;
  }

  const std::vector<Scale>& scale_list() const { return scales_; }

 private:
  const BumpTable& table_;
  std::vector<Scale> scales_;
  std::vector<double> weight2_;
  std::vector<double> reach_;
};

SampledField closed_form_values(const MultiplierSpec& spec, const SignPattern& pattern, const Grid& grid,
                                double tolerance) {
  if (grid.dim() != spec.dim) throw InvalidArgument("grid dimension does not match the multiplier");
  const auto sc = scales(spec, true);
  check_pattern(sc, pattern);
  const double h = grid.spacing();
  if (!is_dyadic_spacing(h) || h > 1.0 / (4.0 * (spec.K + 1)))
    throw ResolutionError("closed-form grid spacing must be a power of two <= 1/(4(K+1)), got " + std::to_string(h));
  const double needed = closed_form_radius(spec, tolerance);
  if (grid.half_width() < needed)
    throw ResolutionError("closed-form grid half-width " + std::to_string(grid.half_width()) + " is below " +
                          std::to_string(needed));
  const BumpTable& table = psi_table(spec.dim);
  const Index P = grid.points_per_axis();
  ComplexArray values = ComplexArray::Zero(grid.size());
  for (std::size_t s = 0; s < sc.size(); ++s) {
    if (sc[s].count == 0) continue;
    const auto period = static_cast<Index>(sc[s].dilation / h);
    if (spec.dim == 2 && period > (Index(1) << 13))
      throw ResolutionError("2-D exponential-sum table for N = " + std::to_string(sc[s].N) + " is too large");
    const ComplexArray S = exponential_sum_table(sc[s], pattern[s], spec.dim, period);
    const double reach = active_radius(sc[s], table);
    const double weight = sc[s].weight;
    const double inv = 1.0 / sc[s].dilation;
    const Index mask = period - 1;
    constexpr Index block = 1 << 14;
    const Index blocks = (grid.size() + block - 1) / block;
    parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
      const Index begin = static_cast<Index>(b) * block;
      const Index end = std::min(grid.size(), begin + block);
      for (Index flat = begin; flat < end; ++flat) {
        const double r = grid.radius(flat);
        if (r >= reach) continue;
        const double g = table.inverse_radial(r * inv);
        // Sample j sits at x = (j - P/2) h; S has period 2^N / h.
        const Index at = spec.dim == 1 ? ((flat - P / 2) & mask)
                                       : ((flat / P - P / 2) & mask) * period + ((flat % P - P / 2) & mask);
        values(flat) += weight * g * S(at);
      }
    });
  }
  return SampledField(grid, std::move(values), Variable::space);
}

std::vector<double> lp_power_batch_1d(const MultiplierSpec& spec, std::span<const SignPattern> patterns, double p,
                                      const LpQuadrature& quad) {
  const auto sc = scales(spec, true);
  for (const auto& pattern : patterns) check_pattern(sc, pattern);
  const BumpTable& table = psi_table(1);
  const double h = quad.spacing;
  const Index J = static_cast<Index>(std::ceil(quad.radius / h)) + 1;
  const PowerOfNorm power(p);

  std::vector<std::size_t> live;  // scales with nonempty index sets
  std::vector<Index> period, reach;
  Index table_entries = 0;
  for (std::size_t s = 0; s < sc.size(); ++s) {
    if (sc[s].count == 0) continue;
    live.push_back(s);
    period.push_back(static_cast<Index>(sc[s].dilation / h));
    reach.push_back(std::min<Index>(J, static_cast<Index>(std::ceil(active_radius(sc[s], table) / h)) + 1));
    table_entries += period.back();
  }
  const std::size_t per_batch = std::clamp<std::size_t>(
      static_cast<std::size_t>((Index(1) << 24) / std::max<Index>(1, table_entries)), 1, 64);

  constexpr Index chunk = 8192;
  const Index chunks = (J + chunk - 1) / chunk;
  std::vector<double> out(patterns.size(), 0.0);
  for (std::size_t first = 0; first < patterns.size(); first += per_batch) {
    const std::size_t nb = std::min(per_batch, patterns.size() - first);
    std::vector<std::vector<ComplexArray>> tables(nb);
    parallel_for(nb, [&](std::size_t b) {
      for (std::size_t l = 0; l < live.size(); ++l)
        tables[b].push_back(exponential_sum_table(sc[live[l]], patterns[first + b][live[l]], 1, period[l]));
    });
    std::vector<double> partial(static_cast<std::size_t>(chunks) * nb, 0.0);
    parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
      const Index j0 = static_cast<Index>(c) * chunk;
      const Index len = std::min(J, j0 + chunk) - j0;
      std::vector<std::size_t> active;
      std::vector<std::vector<double>> w;
      for (std::size_t l = 0; l < live.size(); ++l) {
        if (j0 >= reach[l]) continue;
        const Scale& s = sc[live[l]];
        std::vector<double> wl(static_cast<std::size_t>(len));
        const double inv = 1.0 / s.dilation;
        for (Index j = 0; j < len; ++j)
          wl[static_cast<std::size_t>(j)] = s.weight * table.inverse_radial(static_cast<double>(j0 + j) * h * inv);
        active.push_back(l);
        w.push_back(std::move(wl));
      }
      for (std::size_t b = 0; b < nb; ++b) {
        double acc = 0.0;
        for (Index j = 0; j < len; ++j) {
          std::complex<double> z = 0.0;
          for (std::size_t a = 0; a < active.size(); ++a) {
            const Index at = (j0 + j) & (period[active[a]] - 1);
            z += w[a][static_cast<std::size_t>(j)] * tables[b][active[a]](at);
          }
          // Tf(-x) is the conjugate of Tf(x), so the negative half doubles.
          acc += (j0 + j == 0 ? 1.0 : 2.0) * power(std::norm(z));
        }
        partial[c * nb + b] = acc;
      }
    });
    for (std::size_t b = 0; b < nb; ++b)
      out[first + b] =
          h * pairwise_sum(0, chunks, [&](Index c) { return partial[static_cast<std::size_t>(c) * nb + b]; });
  }
  return out;
}

std::vector<double> lp_power_batch_2d(const MultiplierSpec& spec, std::span<const SignPattern> patterns, double p,
                                      const LpQuadrature& quad) {
  const double L = ceil_power_of_two(quad.radius);
  const auto P = static_cast<Index>(2.0 * L / quad.spacing);
  if (P * P > (Index(1) << 24))
    throw ResolutionError("2-D closed-form grid needs " + std::to_string(P) + "^2 points");
  const Grid grid(2, L, P);
  std::vector<double> out;
  for (const auto& pattern : patterns) {
    const auto field = closed_form_values(spec, pattern, grid, closed_form_tail_tolerance);
    const auto& v = field.values();
    const PowerOfNorm power(p);
    out.push_back(grid.cell_measure() * pairwise_sum(0, v.size(), [&](Index i) { return power(std::norm(v(i))); }));
  }
  return out;
}

KhintchineResult summarize(std::vector<double> values, LpQuadrature quad) {
  KhintchineResult result;
  result.quadrature = quad;
  const auto M = static_cast<double>(values.size());
  result.mean = pairwise_sum(values) / M;
  if (values.size() > 1) {
    const double mean = result.mean;
    const double ss = pairwise_sum(0, static_cast<Index>(values.size()), [&](Index i) {
      const double d = values[static_cast<std::size_t>(i)] - mean;
      return d * d;
    });
    result.standard_error = std::sqrt(ss / (M - 1.0) / M);
  }
  result.values = std::move(values);
  return result;
}

void check_exhaustive(const MultiplierSpec& spec) {
  const auto n = sign_count(spec);
  if (n > exhaustive_max_signs)
    throw InvalidArgument("exhaustive enumeration over " + std::to_string(n) + " signs exceeds the limit of " +
                          std::to_string(exhaustive_max_signs));
}

double envelope_radius(const BumpTable& table, double level) {
  return first_below([&](double r) { return table.envelope(r); }, table.range(), level);
}

}  // namespace

void ScenarioParams::validate() const {
  if (dim != 1 && dim != 2) throw UnsupportedDimension(dim);
  if (!(p > 1.0 && p < 2.0)) throw InvalidExponent("p must lie in (1, 2), got " + std::to_string(p));
  if (!(s > 0.0)) throw InvalidArgument("s must be positive");
  if (!(r >= 1.0)) throw InvalidExponent("r must be >= 1, got " + std::to_string(r));
  const double gap = growth_exponent() - s / dim;
  if (std::abs(gap) > critical_line_tolerance)
    throw InvalidArgument("(p, s) is off the critical line |1/p - 1/2| = s/n by " + std::to_string(gap));
  if (!(critical_exponent() > -1.0))
    throw InvalidArgument("partial-sum exponent np - n - p/2 must exceed -1");
}

double reference_test_norm(int dim, double p) {
  if (dim != 1 && dim != 2) throw UnsupportedDimension(dim);
  if (!(p >= 1.0) || std::isinf(p)) throw InvalidExponent("reference norm needs 1 <= p < infinity");
  static std::mutex mutex;
  static std::map<std::pair<int, double>, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find({dim, p}); it != cache.end()) return it->second;
  const BumpTable& table = phi_test_table(dim);
  const auto& v = table.samples();
  const double h = table.spacing();
  const auto n = static_cast<Index>(v.size());
  double sum;
  if (dim == 1) {
    sum = std::pow(std::abs(v[0]), p) +
          2.0 * pairwise_sum(1, n, [&](Index i) { return std::pow(std::abs(v[static_cast<std::size_t>(i)]), p); });
    sum *= h;
  } else {
    sum = two_pi * h * h * pairwise_sum(1, n, [&](Index i) {
            return static_cast<double>(i) * std::pow(std::abs(v[static_cast<std::size_t>(i)]), p);
          });
  }
  const double norm = std::pow(sum, 1.0 / p);
  cache[{dim, p}] = norm;
  return norm;
}

double f_lp_norm(int K, double p, int dim, NormMode mode) {
  if (K < 1) throw InvalidArgument("K must be >= 1");
  if (mode == NormMode::scaling) return std::pow(K, dim * (p - 1.0) / p) * reference_test_norm(dim, p);
  if (!(p >= 1.0)) throw InvalidExponent("f_lp_norm needs p >= 1");

  // Direct: sample f^ on a frequency grid and transform.
  const BumpTable& table = phi_test_table(dim);
  const double level = dim == 1 ? 1e-13 : 1e-7;
  const double h = floor_power_of_two(1.0 / ((dim == 1 ? 2048.0 : 64.0) * K));
  const double L = ceil_power_of_two(envelope_radius(table, level * std::abs(table.inverse_radial(0.0))) / K);
  const auto P = static_cast<Index>(2.0 * L / h);
  const Index budget = dim == 1 ? (Index(1) << 22) : (Index(1) << 12);
  if (P > budget) throw ResolutionError("direct f norm needs " + std::to_string(P) + " points per axis");
  const Grid x_grid(dim, L, P);
  const auto f_hat =
      SampledField::sample(x_grid.dual(), Variable::frequency, [K](const Point& xi) { return test_function_hat(xi, K); });
  return lp_norm(fourier_inverse(f_hat), p);
}

SampledField apply_spectral(const SampledField& m, const SampledField& f_hat) {
  if (m.variable() != Variable::frequency || f_hat.variable() != Variable::frequency)
    throw InvalidArgument("apply_spectral expects frequency-variable fields");
  if (m.grid() != f_hat.grid()) throw InvalidArgument("multiplier and f^ live on different grids");
  return fourier_inverse(SampledField(m.grid(), m.values() * f_hat.values(), Variable::frequency));
}

SampledField apply_spectral(const SampledField& m, int K) {
  if (K < 1) throw InvalidArgument("K must be >= 1");
  return apply_spectral(m, SampledField::sample(m.grid(), Variable::frequency,
                                                [K](const Point& xi) { return test_function_hat(xi, K); }));
}

double closed_form_envelope(const MultiplierSpec& spec, double r) {
  const BumpTable& table = psi_table(spec.dim);
  double sum = 0.0;
  for (const auto& sc : scales(spec, false))
    sum += sc.weight * static_cast<double>(sc.count) * table.envelope(r / sc.dilation);
  return sum;
}

double closed_form_radius(const MultiplierSpec& spec, double level) {
  const BumpTable& table = psi_table(spec.dim);
  const auto sc = scales(spec, false);
  auto envelope = [&](double r) {
    double sum = 0.0;
    for (const auto& s : sc) sum += s.weight * static_cast<double>(s.count) * table.envelope(r / s.dilation);
    return sum;
  };
  return first_below(envelope, std::ldexp(table.range(), spec.K), level);
}

SampledField apply_closed_form(const MultiplierSpec& spec, const SignAssignment& signs, const Grid& grid,
                               double tolerance) {
  return closed_form_values(spec, sign_pattern(spec, signs), grid, tolerance);
}

std::complex<double> closed_form_at(const Point& x, const MultiplierSpec& spec, const SignAssignment& signs) {
  if (x.size() != spec.dim) throw InvalidArgument("point dimension does not match the multiplier");
  const BumpTable& table = psi_table(spec.dim);
  std::complex<double> sum = 0.0;
  for (const auto& sc : scales(spec, true)) {
    const double g = table.inverse_radial(x.norm() / sc.dilation);
    if (g == 0.0) continue;
    std::complex<double> phase_sum = 0.0;
    for (const auto& k : sc.ks) {
      double dot = x(0) * static_cast<double>(k[0]);
      if (spec.dim == 2) dot += x(1) * static_cast<double>(k[1]);
      phase_sum += static_cast<double>(signs(sc.N, k)) * std::polar(1.0, two_pi * dot / sc.dilation);
    }
    sum += sc.weight * g * phase_sum;
  }
  return sum;
}

double square_function(const Point& x, const MultiplierSpec& spec) {
  if (x.size() != spec.dim) throw InvalidArgument("point dimension does not match the multiplier");
  return std::sqrt(SquareFunctionEval(spec).squared(x.norm()));
}

LpQuadrature lp_quadrature(const MultiplierSpec& spec, double p, double tolerance) {
  spec.validate();
  if (!(p >= 1.0)) throw InvalidExponent("p must be >= 1");
  LpQuadrature quad;
  quad.spacing = floor_power_of_two(1.0 / (4.0 * (spec.K + 1)));
  quad.radius = closed_form_radius(spec, std::pow(tolerance, 1.0 / p));
  return quad;
}

double square_functional(const MultiplierSpec& spec, double p, const LpQuadrature& quad) {
  if (!(p >= 1.0)) throw InvalidExponent("p must be >= 1");
  const SquareFunctionEval G(spec);
  const double h = quad.spacing;
  const Index J = static_cast<Index>(std::ceil(quad.radius / h)) + 1;
  const double half_p = p / 2.0;
  if (spec.dim == 1) {
    const double sum = chunked_sum(J, 8192, [&](Index b, Index e) {
      double acc = 0.0;
      for (Index j = b; j < e; ++j) acc += (j == 0 ? 1.0 : 2.0) * std::pow(G.squared(static_cast<double>(j) * h), half_p);
      return acc;
    });
    return h * sum;
  }
  const double sum = chunked_sum(J, 8192, [&](Index b, Index e) {
    double acc = 0.0;
    for (Index j = b; j < e; ++j) {
      const double r = (static_cast<double>(j) + 0.5) * h;
      acc += r * std::pow(G.squared(r), half_p);
    }
    return acc;
  });
  return two_pi * h * sum;
}

std::vector<double> lp_power_batch(const MultiplierSpec& spec, std::span<const SignPattern> patterns, double p,
                                   const LpQuadrature& quad) {
  spec.validate();
  if (!(p >= 1.0)) throw InvalidExponent("p must be >= 1");
  if (!is_dyadic_spacing(quad.spacing) || quad.spacing > 1.0 / (4.0 * (spec.K + 1)))
    throw ResolutionError("quadrature spacing must be a power of two <= 1/(4(K+1))");
  if (!(quad.radius > 0)) throw InvalidArgument("quadrature radius must be positive");
  if (spec.dim == 1) return lp_power_batch_1d(spec, patterns, p, quad);
  return lp_power_batch_2d(spec, patterns, p, quad);
}

std::vector<std::uint64_t> derive_seeds(std::uint64_t master, int count) {
  if (count < 0) throw InvalidArgument("seed count must be nonnegative");
  std::vector<std::uint64_t> seeds;
  const std::uint64_t base = mix64(master);
  for (int i = 0; i < count; ++i) seeds.push_back(mix64(base + static_cast<std::uint64_t>(i)));
  return seeds;
}

KhintchineResult khintchine_mc(const MultiplierSpec& spec, double p, int samples) {
  spec.validate();
  if (samples < 2) throw InvalidArgument("Monte Carlo needs at least 2 samples");
  const auto quad = lp_quadrature(spec, p);
  const auto seeds = derive_seeds(spec.seed, samples);
  std::vector<SignPattern> patterns;
  for (auto seed : seeds) patterns.push_back(sign_pattern(spec, SignAssignment(seed)));
  auto result = summarize(lp_power_batch(spec, patterns, p, quad), quad);
  result.seeds = seeds;
  return result;
}

std::int64_t sign_count(const MultiplierSpec& spec) {
  spec.validate();
  std::int64_t n = 0;
  for (int N = 1; N <= spec.K; ++N) n += index_set_size(N, spec.dim);
  return n;
}

SignPattern enumerated_pattern(const MultiplierSpec& spec, std::uint64_t t) {
  check_exhaustive(spec);
  SignPattern pattern;
  int bit = 0;
  for (int N = 1; N <= spec.K; ++N) {
    std::vector<std::int8_t> row(static_cast<std::size_t>(index_set_size(N, spec.dim)));
    for (auto& v : row) v = ((t >> bit++) & 1U) ? 1 : -1;
    pattern.push_back(std::move(row));
  }
  return pattern;
}

KhintchineResult khintchine_exhaustive(const MultiplierSpec& spec, double p) {
  check_exhaustive(spec);
  const auto quad = lp_quadrature(spec, p);
  const std::uint64_t total = std::uint64_t(1) << sign_count(spec);
  std::vector<SignPattern> patterns;
  for (std::uint64_t t = 0; t < total; ++t) patterns.push_back(enumerated_pattern(spec, t));
  auto result = summarize(lp_power_batch(spec, patterns, p, quad), quad);
  result.standard_error = 0.0;
  return result;
}

std::vector<double> exhaustive_square_mean(const MultiplierSpec& spec, std::span<const Point> xs) {
  check_exhaustive(spec);
  const BumpTable& table = psi_table(spec.dim);
  const auto sc = scales(spec, true);
  std::vector<double> out;
  for (const auto& x : xs) {
    if (x.size() != spec.dim) throw InvalidArgument("point dimension does not match the multiplier");
    // One complex term per Rademacher variable.
    std::vector<std::complex<double>> terms;
    for (const auto& s : sc) {
      const double g = table.inverse_radial(x.norm() / s.dilation);
      for (const auto& k : s.ks) {
        double dot = x(0) * static_cast<double>(k[0]);
        if (spec.dim == 2) dot += x(1) * static_cast<double>(k[1]);
        terms.push_back(s.weight * g * std::polar(1.0, two_pi * dot / s.dilation));
      }
    }
    const std::uint64_t total = std::uint64_t(1) << terms.size();
    double acc = 0.0;
    for (std::uint64_t t = 0; t < total; ++t) {
      std::complex<double> z = 0.0;
      for (std::size_t i = 0; i < terms.size(); ++i) z += ((t >> i) & 1U) ? terms[i] : -terms[i];
      acc += std::norm(z);
    }
    out.push_back(acc / static_cast<double>(total));
  }
  return out;
}

double lower_bound_partial_sum(int K, const ScenarioParams& params) {
  params.validate();
  if (K < 1) throw InvalidArgument("K must be >= 1");
  const double e1 = params.critical_exponent();
  double sum = 0.0;
  for (int N = 1; N <= K; ++N) sum += std::pow(static_cast<double>(N), e1);
  return sum;
}

std::vector<ShellRow> shell_table(const MultiplierSpec& spec, double p, double A, double step) {
  if (!(A > 0) || !(step > 0)) throw InvalidArgument("shell table needs A > 0 and step > 0");
  if (!(p >= 1.0)) throw InvalidExponent("p must be >= 1");
  const SquareFunctionEval G(spec);
  const auto& sc = G.scale_list();
  const int n = spec.dim;
  std::vector<ShellRow> rows;
  for (std::size_t i = 0; i < sc.size(); ++i) {
    ShellRow row;
    row.N = sc[i].N;
    row.inner = A * sc[i].dilation;
    const double width = row.inner;  // shell [a, 2a)
    const auto nodes = static_cast<Index>(std::ceil(width / step));
    const double dr = width / static_cast<double>(nodes);
    auto measure = [&](double r) { return n == 1 ? 2.0 * dr : two_pi * r * dr; };
    row.full = chunked_sum(nodes, 8192, [&](Index b, Index e) {
      double acc = 0.0;
      for (Index j = b; j < e; ++j) {
        const double r = row.inner + (static_cast<double>(j) + 0.5) * dr;
        acc += std::pow(G.squared(r), p / 2.0) * measure(r);
      }
      return acc;
    });
    row.restricted = chunked_sum(nodes, 8192, [&](Index b, Index e) {
      double acc = 0.0;
      for (Index j = b; j < e; ++j) {
        const double r = row.inner + (static_cast<double>(j) + 0.5) * dr;
        acc += std::pow(G.scale_term(i, r), p / 2.0) * measure(r);
      }
      return acc;
    });
    row.predicted = std::pow(c_coeff(row.N, spec.s), p) * std::pow(static_cast<double>(row.N), (n - 1) * p / 2.0) *
                    std::pow(2.0, n * row.N * (1.0 - p / 2.0));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace critline
