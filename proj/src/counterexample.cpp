#include "critline/counterexample.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "critline/bumps.hpp"
#include "critline/parallel.hpp"

namespace critline {

namespace {

// Squared bounds (N 2^N)^2 and ((2N + 1) 2^{N-1})^2 of I_N.
std::pair<std::int64_t, std::int64_t> squared_bounds(int N) {
  const std::int64_t lo = static_cast<std::int64_t>(N) << N;
  const std::int64_t hi = static_cast<std::int64_t>(2 * N + 1) << (N - 1);
  return {lo * lo, hi * hi};
}

std::int64_t isqrt(std::int64_t v) {
  if (v <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

void check_scale(int N) {
  if (N < 1) throw InvalidArgument("scale N must be >= 1");
  if (N > 28) throw InvalidArgument("scale N > 28 overflows the exact enumeration");
}

}  // namespace

void MultiplierSpec::validate() const {
  if (dim != 1 && dim != 2) throw UnsupportedDimension(dim);
  if (K < 1) throw InvalidArgument("K must be >= 1");
  if (!(s > 0) || !std::isfinite(s)) throw InvalidArgument("s must be positive");
}

bool IndexSet::contains(const LatticePoint& k) const {
  if (k[0] < 1 || (dim == 2 && k[1] < 1) || (dim == 1 && k[1] != 0)) return false;
  const auto [lo2, hi2] = squared_bounds(N);
  const std::int64_t r2 = k[0] * k[0] + k[1] * k[1];
  return lo2 < r2 && r2 < hi2;
}

IndexSet index_set(int N, int dim) {
  check_scale(N);
  if (dim != 1 && dim != 2) throw UnsupportedDimension(dim);
  IndexSet set{N, dim, {}};
  const auto [lo2, hi2] = squared_bounds(N);
  if (dim == 1) {
    for (std::int64_t k = isqrt(lo2); k * k < hi2; ++k)
      if (k >= 1 && k * k > lo2) set.ks.push_back({k, 0});
    return set;
  }
  if (index_set_size(N, dim) > (std::int64_t(1) << 26))
    throw ResolutionError("index set I_" + std::to_string(N) + " in 2-D is too large to list");
  for (std::int64_t a = 1; a * a < hi2; ++a) {
    // b ranges over lo2 - a^2 < b^2 < hi2 - a^2, b >= 1.
    std::int64_t b = std::max<std::int64_t>(1, isqrt(std::max<std::int64_t>(0, lo2 - a * a)));
    for (; a * a + b * b < hi2; ++b)
      if (a * a + b * b > lo2) set.ks.push_back({a, b});
  }
  return set;
}

std::int64_t index_set_size(int N, int dim) {
  check_scale(N);
  const auto [lo2, hi2] = squared_bounds(N);
  if (dim == 1) {
    std::int64_t count = 0;
    for (std::int64_t k = isqrt(lo2); k * k < hi2; ++k)
      if (k >= 1 && k * k > lo2) ++count;
    return count;
  }
  if (dim != 2) throw UnsupportedDimension(dim);
  std::int64_t count = 0;
  for (std::int64_t a = 1; a * a < hi2; ++a) {
    // #{b >= 1 : lo2 - a^2 < b^2 < hi2 - a^2}
    const std::int64_t upper = isqrt(hi2 - a * a - 1);          // b^2 <= hi2 - a^2 - 1
    const std::int64_t lower = lo2 - a * a < 0 ? 0 : isqrt(lo2 - a * a);  // b^2 <= lo2 - a^2 excluded
    count += std::max<std::int64_t>(0, upper - std::max<std::int64_t>(lower, 0));
  }
  return count;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int sign(std::uint64_t seed, int N, const LatticePoint& k) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(N));
  h = mix64(h ^ static_cast<std::uint64_t>(k[0]));
  h = mix64(h ^ static_cast<std::uint64_t>(k[1]));
  return (h & 1U) ? 1 : -1;
}

SignPattern sign_pattern(const MultiplierSpec& spec, const SignAssignment& signs) {
  spec.validate();
  SignPattern pattern(static_cast<std::size_t>(spec.K));
  for (int N = 1; N <= spec.K; ++N) {
    const IndexSet set = index_set(N, spec.dim);
    auto& row = pattern[static_cast<std::size_t>(N - 1)];
    row.reserve(set.size());
    for (const auto& k : set.ks) row.push_back(static_cast<std::int8_t>(signs(N, k)));
  }
  return pattern;
}

double c_coeff(int N, double s) {
  if (N < 1) throw InvalidArgument("c_N needs N >= 1");
  if (!(s > 0)) throw InvalidArgument("c_N needs s > 0");
  return std::pow(2.0, -N * s) * std::pow(static_cast<double>(N), -s);
}

std::optional<Bump> locate(const Point& xi, const MultiplierSpec& spec) {
  const double r = xi.norm();
  // Scale-N bumps live in the annulus (N - 1/4, N + 3/4).
  const double Nf = std::floor(r + 0.25);
  if (Nf < 1.0 || Nf > static_cast<double>(spec.K)) return std::nullopt;
  const int N = static_cast<int>(Nf);
  const double scale = std::ldexp(1.0, N);
  LatticePoint k{0, 0};
  double dist2 = 0.0;
  for (Index a = 0; a < xi.size(); ++a) {
    const double y = scale * xi(a);
    const double c = std::nearbyint(y);
    k[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(c);
    dist2 += (y - c) * (y - c);
  }
  if (dist2 >= 0.25) return std::nullopt;
  const auto [lo2, hi2] = squared_bounds(N);
  if (k[0] < 1 || (spec.dim == 2 && k[1] < 1)) return std::nullopt;
  const std::int64_t r2 = k[0] * k[0] + k[1] * k[1];
  if (!(lo2 < r2 && r2 < hi2)) return std::nullopt;
  return Bump{N, k};
}

double eval_multiplier(const Point& xi, const MultiplierSpec& spec, const SignAssignment& signs) {
  const auto bump = locate(xi, spec);
  if (!bump) return 0.0;
  const double scale = std::ldexp(1.0, bump->N);
  double d2 = 0.0;
  for (Index a = 0; a < xi.size(); ++a) {
    const double d = scale * xi(a) - static_cast<double>(bump->k[static_cast<std::size_t>(a)]);
    d2 += d * d;
  }
  return c_coeff(bump->N, spec.s) * signs(bump->N, bump->k) * psi_profile(std::sqrt(d2));
}

Multiplier counterexample_multiplier(const MultiplierSpec& spec) {
  spec.validate();
  Multiplier m;
  m.name = "counterexample";
  m.dim = spec.dim;
  m.value = [spec](const Point& xi) { return eval_multiplier(xi, spec); };
  const int K = spec.K;
  m.feature_scale = [K](double lo, double hi) {
    // Largest N whose annulus (N - 1/4, N + 3/4) meets [lo, hi].
    const int top = std::min(K, static_cast<int>(std::ceil(hi + 0.25)) - 1);
    if (top < 1 || top + 0.75 <= lo) return std::numeric_limits<double>::infinity();
    return std::ldexp(1.0, -top);
  };
  return m;
}

DRange counterexample_D_range(int K) {
  return {-2, static_cast<int>(std::ceil(std::log2(K + 0.75))) + 1};
}

DisjointnessReport support_disjointness_check(const MultiplierSpec& spec, std::int64_t samples) {
  spec.validate();
  DisjointnessReport report;
  for (int N = 1; N < spec.K; ++N) {
    // Open intervals (N - 1/4, N + 3/4) and (N' - 1/4, N' + 3/4), N < N'.
    for (int M = N + 1; M <= spec.K; ++M)
      if (N + 0.75 > M - 0.25) report.annuli_disjoint = false;
  }
  if (!report.annuli_disjoint) throw InvariantViolation("scale annuli overlap");
  if (spec.K > brute_force_max_K) return report;

  report.brute_force = true;
  std::vector<IndexSet> sets;
  for (int N = 1; N <= spec.K; ++N) sets.push_back(index_set(N, spec.dim));
  const double extent = spec.K + 1.0;
  auto count_bumps = [&](const Point& xi) {
    int hits = 0;
    for (const auto& set : sets) {
      const double scale = std::ldexp(1.0, set.N);
      for (const auto& k : set.ks) {
        double d2 = 0.0;
        for (Index a = 0; a < xi.size(); ++a) {
          const double d = scale * xi(a) - static_cast<double>(k[static_cast<std::size_t>(a)]);
          d2 += d * d;
        }
        if (d2 < 0.25) ++hits;
      }
    }
    return hits;
  };
  auto tally = [&](const Point& xi) {
    const int hits = count_bumps(xi);
    report.covered += hits == 1;
    report.overlaps += hits > 1;
    ++report.samples;
  };
  Point xi(spec.dim);
  if (spec.dim == 1) {
    // Both half-lines, so the empty negative side is scanned too.
    for (std::int64_t i = 0; i < samples; ++i) {
      xi(0) = -extent + 2.0 * extent * (static_cast<double>(i) + 0.5) / static_cast<double>(samples);
      tally(xi);
    }
  } else {
    const auto side = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(samples))));
    for (std::int64_t i = 0; i < side; ++i) {
      for (std::int64_t j = 0; j < side; ++j) {
        xi(0) = extent * (static_cast<double>(i) + 0.5) / static_cast<double>(side);
        xi(1) = extent * (static_cast<double>(j) + 0.5) / static_cast<double>(side);
        tally(xi);
      }
    }
  }
  if (report.overlaps > 0)
    throw InvariantViolation(std::to_string(report.overlaps) + " sample points lie in two or more bumps");
  return report;
}

SampledField sample_multiplier(const MultiplierSpec& spec, const SignAssignment& signs, const Grid& grid) {
  spec.validate();
  if (grid.dim() != spec.dim) throw InvalidArgument("grid dimension does not match the multiplier");
  if (grid.spacing() > multiplier_max_spacing(spec.K) * (1 + 1e-12))
    throw ResolutionError("multiplier grid spacing " + std::to_string(grid.spacing()) + " exceeds 2^-(K+3)");
  if (grid.half_width() < spec.K + 1.0) throw ResolutionError("multiplier grid half-width must be >= K + 1");
  ComplexArray values(grid.size());
  constexpr Index block = 1 << 14;
  const Index blocks = (grid.size() + block - 1) / block;
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
    const Index begin = static_cast<Index>(b) * block;
    const Index end = std::min(grid.size(), begin + block);
    for (Index i = begin; i < end; ++i) values(i) = eval_multiplier(grid.point(i), spec, signs);
  });
  return SampledField(grid, std::move(values), Variable::frequency);
}

SampledField sample_multiplier(const MultiplierSpec& spec, const Grid& grid) {
  return sample_multiplier(spec, SignAssignment(spec.seed), grid);
}

}  // namespace critline
