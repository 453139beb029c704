#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "critline/bumps.hpp"
#include "critline/counterexample.hpp"
#include "critline/operator.hpp"
#include "oracles.hpp"

using namespace critline;

namespace {

/// Every k with strict bounds, counted by a plain double loop in long double.
std::vector<LatticePoint> brute_index_set(int N, int dim) {
  const long double lo = static_cast<long double>(N) * std::ldexp(1.0L, N);
  const long double hi = (N + 0.5L) * std::ldexp(1.0L, N);
  std::vector<LatticePoint> out;
  const auto top = static_cast<std::int64_t>(hi) + 1;
  for (std::int64_t a = 1; a <= top; ++a) {
    for (std::int64_t b = dim == 1 ? 0 : 1; b <= (dim == 1 ? 0 : top); ++b) {
      const long double r = std::sqrt(static_cast<long double>(a * a + b * b));
      if (lo < r && r < hi) out.push_back({a, b});
    }
  }
  return out;
}

/// Scan of every (N, k) whose support contains xi.
std::vector<Bump> brute_locate(const Point& xi, const MultiplierSpec& spec) {
  std::vector<Bump> hits;
  for (int N = 1; N <= spec.K; ++N) {
    for (const auto& k : index_set(N, spec.dim).ks) {
      double d2 = 0;
      for (Index a = 0; a < xi.size(); ++a) {
        const double d = std::ldexp(xi(a), N) - static_cast<double>(k[a]);
        d2 += d * d;
      }
      if (d2 < 0.25) hits.push_back({N, k});
    }
  }
  return hits;
}

}  // namespace

TEST(IndexSet, OneDimensionalExamples) {
  EXPECT_EQ(index_set(1, 1).size(), 0u);
  const IndexSet s3 = index_set(3, 1);
  ASSERT_EQ(s3.size(), 3u);
  EXPECT_EQ(s3.ks[0][0], 25);
  EXPECT_EQ(s3.ks[2][0], 27);
  EXPECT_EQ(index_set(2, 1).ks.front()[0], 9);
  for (int N = 1; N <= 14; ++N) {
    EXPECT_EQ(index_set(N, 1).size(), (std::size_t(1) << (N - 1)) - 1) << "N = " << N;
    EXPECT_EQ(index_set_size(N, 1), (std::int64_t(1) << (N - 1)) - 1);
  }
}

TEST(IndexSet, TwoDimensionalExamples) {
  const IndexSet s1 = index_set(1, 2);
  const std::vector<LatticePoint> expect{{1, 2}, {2, 1}, {2, 2}};
  EXPECT_EQ(s1.ks, expect);
  const std::vector<std::int64_t> counts{3, 26, 161, 839, 4207, 20083};
  for (int N = 1; N <= 6; ++N) {
    const IndexSet s = index_set(N, 2);
    EXPECT_EQ(static_cast<std::int64_t>(s.size()), counts[N - 1]);
    EXPECT_EQ(index_set_size(N, 2), counts[N - 1]);
    EXPECT_EQ(s.ks, brute_index_set(N, 2));
    EXPECT_TRUE(std::is_sorted(s.ks.begin(), s.ks.end()));
    EXPECT_EQ(std::set<LatticePoint>(s.ks.begin(), s.ks.end()).size(), s.size());
  }
  for (int N = 1; N <= 10; ++N) EXPECT_EQ(index_set(N, 1).ks, brute_index_set(N, 1));
}

TEST(IndexSet, BoundaryPointsExcluded) {
  // |(6, 8)| = 10 = (2 + 1/2) 2^2 sits on the outer bound of I_2.
  const IndexSet s2 = index_set(2, 2);
  EXPECT_FALSE(s2.contains({6, 8}));
  EXPECT_FALSE(s2.contains({8, 6}));
  EXPECT_TRUE(s2.contains({7, 5}));
  EXPECT_FALSE(s2.contains({9, 0}));  // zero coordinate is outside N^2
  EXPECT_FALSE(index_set(2, 1).contains({8, 0}));
  EXPECT_FALSE(index_set(2, 1).contains({10, 0}));
  EXPECT_THROW(index_set(0, 1), InvalidArgument);
  EXPECT_THROW(index_set(2, 3), UnsupportedDimension);
}

TEST(Signs, Deterministic) {
  for (int N = 1; N <= 8; ++N)
    for (const auto& k : index_set(N, 1).ks) EXPECT_EQ(sign(42, N, k), sign(42, N, k));
  const MultiplierSpec spec{1, 0.25, 6, 5};
  EXPECT_EQ(sign_pattern(spec), sign_pattern(spec));
  // A sign does not depend on K.
  const MultiplierSpec wider{1, 0.25, 9, 5};
  const SignPattern a = sign_pattern(spec), b = sign_pattern(wider);
  for (std::size_t N = 0; N < a.size(); ++N) EXPECT_EQ(a[N], b[N]);
}

TEST(Signs, Balanced) {
  const IndexSet s8 = index_set(8, 1);
  const double bound = 3.0 / std::sqrt(static_cast<double>(s8.size()));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    double mean = 0;
    for (const auto& k : s8.ks) mean += sign(seed, 8, k);
    mean /= static_cast<double>(s8.size());
    EXPECT_LE(std::abs(mean), bound) << "seed " << seed;
  }
  // 10^4 consecutive signs: the mean has standard deviation 0.01, so a 4
  // sigma bound per seed and a 2% bound on the pooled mean.
  const IndexSet s15 = index_set(15, 1);
  double pooled = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    double mean = 0;
    for (std::size_t i = 0; i < 10000; ++i) mean += sign(seed, 15, s15.ks[i]);
    EXPECT_LE(std::abs(mean / 10000), 0.04) << "seed " << seed;
    pooled += mean;
  }
  EXPECT_LE(std::abs(pooled / 200000), 0.02);
}

TEST(Signs, SeedChangesPattern) {
  const IndexSet s4 = index_set(4, 1);
  std::mt19937_64 rng(17);
  int collisions = 0;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t a = rng(), b = rng();
    bool differ = false;
    for (const auto& k : s4.ks) differ |= sign(a, 4, k) != sign(b, 4, k);
    collisions += !differ;
  }
  EXPECT_EQ(collisions, 0);
}

TEST(Coefficients, Values) {
  for (double s : {0.25, 0.5, 1.0}) EXPECT_DOUBLE_EQ(c_coeff(1, s), std::pow(2.0, -s));
  EXPECT_NEAR(c_coeff(2, 0.25), std::pow(2.0, -0.75), 1e-15);
  EXPECT_NEAR(c_coeff(2, 0.25), 0.59460, 1e-5);
  for (int N = 1; N < 30; ++N) {
    EXPECT_LE(c_coeff(N, 0.25), 1.0);
    EXPECT_LT(c_coeff(N + 1, 0.25), c_coeff(N, 0.25));
  }
  EXPECT_THROW(c_coeff(0, 0.25), InvalidArgument);
}

TEST(Locate, SmallRadiusAndCenters) {
  const MultiplierSpec spec{1, 0.25, 6, 1};
  for (double r : {0.0, 0.3, 0.75, -0.75}) EXPECT_FALSE(locate(make_point(r), spec));
  for (int N = 1; N <= 6; ++N) {
    for (const auto& k : index_set(N, 1).ks) {
      const auto b = locate(make_point(std::ldexp(double(k[0]), -N)), spec);
      ASSERT_TRUE(b);
      EXPECT_EQ(b->N, N);
      EXPECT_EQ(b->k, k);
    }
  }
  const MultiplierSpec plane{2, 0.25, 3, 1};
  for (const auto& k : index_set(3, 2).ks) {
    const auto b = locate(make_point(k[0] / 8.0, k[1] / 8.0), plane);
    ASSERT_TRUE(b);
    EXPECT_EQ(b->k, k);
  }
}

TEST(Locate, AgreesWithBruteForce) {
  const MultiplierSpec spec{1, 0.25, 4, 1};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  int found = 0;
  for (int i = 0; i < 100000; ++i) {
    const Point xi = make_point(u(rng));
    const auto hits = brute_locate(xi, spec);
    ASSERT_LE(hits.size(), 1u);
    const auto b = locate(xi, spec);
    ASSERT_EQ(b.has_value(), !hits.empty()) << xi(0);
    if (b) {
      EXPECT_EQ(b->N, hits[0].N);
      EXPECT_EQ(b->k, hits[0].k);
      ++found;
    }
  }
  EXPECT_GT(found, 1000);

  const MultiplierSpec plane{2, 0.25, 3, 1};
  std::uniform_real_distribution<double> v(0.0, 4.0);
  for (int i = 0; i < 5000; ++i) {
    const Point xi = make_point(v(rng), v(rng));
    const auto hits = brute_locate(xi, plane);
    const auto b = locate(xi, plane);
    ASSERT_EQ(b.has_value(), !hits.empty());
    if (b) EXPECT_EQ(b->k, hits[0].k);
  }
}

TEST(Multiplier, CenterValuesAndBounds) {
  const MultiplierSpec spec{1, 0.25, 6, 3};
  for (int N = 1; N <= 6; ++N)
    for (const auto& k : index_set(N, 1).ks)
      EXPECT_EQ(eval_multiplier(make_point(std::ldexp(double(k[0]), -N)), spec), c_coeff(N, 0.25) * sign(3, N, k));
  double sup = 0;
  for (int i = 0; i < 200000; ++i) {
    const double xi = -8.0 + 16.0 * i / 200000.0;
    const double v = eval_multiplier(make_point(xi), spec);
    sup = std::max(sup, std::abs(v));
    if (std::abs(xi) >= 6.75 || std::abs(xi) <= 0.75) EXPECT_EQ(v, 0.0);
  }
  EXPECT_LE(sup, std::pow(2.0, -0.25));
}

TEST(Multiplier, Locality) {
  const MultiplierSpec spec{1, 0.25, 5, 7};
  const Point xi = make_point(27.1 / 8.0);
  const auto here = locate(xi, spec);
  ASSERT_TRUE(here);
  const SignAssignment flipped([&](int N, const LatticePoint& k) {
    const int base = sign(spec.seed, N, k);
    return (N == here->N && k == here->k) ? base : -base;
  });
  EXPECT_EQ(eval_multiplier(xi, spec, flipped), eval_multiplier(xi, spec));
}

TEST(Disjointness, NoOverlaps) {
  for (int K = 1; K <= brute_force_max_K; ++K) {
    const auto r = support_disjointness_check({1, 0.25, K, 1});
    EXPECT_TRUE(r.annuli_disjoint);
    EXPECT_TRUE(r.brute_force);
    EXPECT_EQ(r.overlaps, 0);
    EXPECT_EQ(r.samples, 10000);
    if (K >= 2) EXPECT_GT(r.covered, 0);
  }
  const auto r2 = support_disjointness_check({2, 0.25, 4, 1});
  EXPECT_EQ(r2.overlaps, 0);
  EXPECT_GT(r2.covered, 0);
  const auto big = support_disjointness_check({1, 0.25, 10, 1});
  EXPECT_TRUE(big.annuli_disjoint);
  EXPECT_FALSE(big.brute_force);
}

TEST(SampleMultiplier, BoundsSupportAndConvergence) {
  const MultiplierSpec spec{1, 0.25, 5, 2};
  const Grid g(1, 8.0, Index(1) << 13);
  const SampledField m = sample_multiplier(spec, g);
  EXPECT_EQ(m.variable(), Variable::frequency);
  EXPECT_LE(lp_norm(m, infinity), std::pow(2.0, -0.25));
  for (Index i = 0; i < g.size(); ++i) {
    const double r = g.radius(i);
    if (r <= 0.75 || r >= 5.75) EXPECT_EQ(m.values()(i), 0.0);
  }
  const SampledField fine = sample_multiplier(spec, Grid(1, 8.0, Index(1) << 14));
  EXPECT_LT(std::abs(lp_norm(fine, 2.0) / lp_norm(m, 2.0) - 1.0), 5e-3);
  EXPECT_TRUE((sample_multiplier(spec, g).values() == m.values()).all());

  EXPECT_THROW(sample_multiplier(spec, Grid(1, 8.0, Index(1) << 11)), ResolutionError);
  EXPECT_THROW(sample_multiplier(spec, Grid(1, 4.0, Index(1) << 13)), ResolutionError);
  EXPECT_THROW(sample_multiplier(spec, Grid(2, 8.0, 64)), InvalidArgument);
}

TEST(SampleMultiplier, TestFunctionReproduces) {
  const MultiplierSpec spec{1, 0.25, 5, 2};
  const Grid g(1, 16.0, Index(1) << 14);
  const SampledField m = sample_multiplier(spec, g);
  for (Index i = 0; i < g.size(); ++i) {
    if (g.radius(i) > 2.0 * spec.K) continue;
    EXPECT_EQ(m.values()(i) * test_function_hat(g.point(i), spec.K), m.values()(i));
  }
}

TEST(CounterexampleNorm, DRangeAndFeatures) {
  const DRange r = counterexample_D_range(6);
  EXPECT_EQ(r.lo, -2);
  EXPECT_EQ(r.hi, 4);
  const Multiplier m = counterexample_multiplier({1, 0.25, 6, 1});
  EXPECT_EQ(m.feature_scale(0.0, 0.5), infinity);
  EXPECT_EQ(m.feature_scale(1.0, 2.0), 0.25);
  EXPECT_EQ(m.feature_scale(4.0, 16.0), std::ldexp(1.0, -6));
  EXPECT_EQ(m.feature_scale(8.0, 32.0), infinity);
  // phi_lp(xi) m(2^D xi) vanishes outside the window.
  for (int D : {-3, r.hi + 1})
    for (double xi = 0.5; xi < 2.0; xi += 1.0 / 512) EXPECT_EQ(m(make_point(std::ldexp(xi, D))), 0.0);
}

TEST(CounterexampleNorm, SelfConvergent) {
  const Multiplier m = counterexample_multiplier({1, 0.25, 6, 1});
  const SmoothnessParams params{0.25, 2.0, {}};
  const HormanderNorm coarse = hormander_multiplier_norm(m, params, counterexample_D_range(6));
  NormGridOptions fine;
  fine.refine = 1;
  const HormanderNorm refined = hormander_multiplier_norm(m, params, counterexample_D_range(6), fine);
  for (std::size_t i = 0; i < coarse.table.size(); ++i) {
    const double a = coarse.table[i].value, b = refined.table[i].value;
    EXPECT_LE(std::abs(a - b), 5e-3 * std::max(a, b)) << "D = " << coarse.table[i].D;
  }
  EXPECT_GT(coarse.value, 0.0);
}

TEST(CounterexampleNorm, MikhlinGrowsWithK) {
  MikhlinOptions o;
  o.xi_min = 0.5;
  o.xi_max = 16.0;
  o.samples = 20000;
  const double k4 = mikhlin_check(counterexample_multiplier({1, 0.25, 4, 1}), 1, o)[1].weighted_sup;
  const double k8 = mikhlin_check(counterexample_multiplier({1, 0.25, 8, 1}), 1, o)[1].weighted_sup;
  EXPECT_GT(k8, 2.0 * k4);
}

TEST(CounterexampleNorm, Hormander1960ZeroOrderBound) {
  const Multiplier m = counterexample_multiplier({1, 0.25, 6, 1});
  const std::vector<double> radii{0.5, 1.0, 2.0, 4.0, 8.0};
  const auto t = hormander1960_check(m, 0, radii);
  for (double v : t[0].values) EXPECT_LE(v, std::pow(2.0, -0.5) * 2.0);
  EXPECT_GT(t[0].sup, 0.0);
}
