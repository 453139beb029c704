// End-to-end acceptance run on the default scenario: n = 1, p = 4/3,
// s = 1/4, r = 2, K in {4, 6, 8, 10, 12}, 64 Monte Carlo draws.
// Prints one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "critline/bumps.hpp"
#include "critline/counterexample.hpp"
#include "critline/error.hpp"
#include "critline/experiment.hpp"
#include "critline/fit.hpp"
#include "critline/norms.hpp"
#include "critline/operator.hpp"
#include "critline/transforms.hpp"

using namespace critline;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

const std::vector<int> sweep_K{4, 6, 8, 10, 12};

SweepConfig default_config() {
  SweepConfig c;
  c.K_list = sweep_K;
  c.samples = 64;
  c.seed = 1;
  return c;
}

// Shared by the growth and divergence criteria.
const std::vector<SweepRecord>& default_sweep() {
  static const std::vector<SweepRecord> records = run_sweep(default_config());
  return records;
}

double pow2_ceil(double v) { return std::ldexp(1.0, static_cast<int>(std::ceil(std::log2(v)))); }

Outcome norm_bounded_in_K() {
  const ScenarioParams sc = ScenarioParams::canonical();
  const std::vector<double> rs{2.0, 4.0};
  Outcome out;
  std::ostringstream detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    std::vector<std::vector<std::pair<double, double>>> columns(rs.size());
    for (int K : sweep_K) {
      const MultiplierSpec spec{sc.dim, sc.s, K, seed};
      const auto norms = hormander_multiplier_norms(counterexample_multiplier(spec), sc.s, rs, counterexample_D_range(K));
      for (std::size_t i = 0; i < rs.size(); ++i) columns[i].emplace_back(K, norms[i].value);
    }
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const FitResult fit = fit_exponent(columns[i]);
      double lo = infinity, hi = 0.0;
      for (const auto& [K, v] : columns[i]) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const bool ok = std::abs(fit.slope) <= 0.05 && hi / lo <= 1.5;
      out.pass = out.pass && ok;
      detail << fmt(" seed %d r=%g: slope %.4f max/min %.4f (%.4f..%.4f)%s;", static_cast<int>(seed), rs[i], fit.slope,
                    hi / lo, lo, hi, ok ? "" : " out of bounds");
    }
  }
  out.detail = "|slope| <= 0.05, max/min <= 1.5:" + detail.str();
  return out;
}

Outcome test_function_scaling() {
  const ScenarioParams sc = ScenarioParams::canonical();
  std::vector<std::pair<double, double>> column;
  for (int K : sweep_K) column.emplace_back(K, std::pow(f_lp_norm(K, sc.p, sc.dim), sc.p));
  const FitResult fit = fit_exponent(column);
  const double target = sc.dim * sc.p - sc.dim;
  const double scaling = f_lp_norm(4, sc.p, sc.dim, NormMode::scaling);
  const double direct = f_lp_norm(4, sc.p, sc.dim, NormMode::direct);
  const double rel = std::abs(direct - scaling) / scaling;
  const bool ok = std::abs(fit.slope - target) <= 1e-6 && fit.residual_max <= 1e-6 && rel <= 1e-6;
  return {ok, fmt("slope %.9f (target %.9f), residual %.2e, direct vs scaling at K=4 %.2e", fit.slope, target,
                  fit.residual_max, rel)};
}

Outcome lower_bound_growth() {
  const ScenarioParams sc = ScenarioParams::canonical();
  const auto& records = default_sweep();
  double lo = infinity, hi = 0.0;
  std::vector<std::pair<double, double>> mc;
  for (const auto& r : records) {
    if (r.K < 6) continue;
    const double q = r.square_functional / r.partial_sum;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    mc.emplace_back(r.K, r.mc_mean);
  }
  const FitResult fit = fit_exponent(mc);
  const double target = sc.critical_exponent() + 1.0 - 0.1;
  const bool ok = hi / lo <= 1.3 && fit.slope >= target;
  return {ok, fmt("int G^p / partial sum spread %.4f (<= 1.3) for K >= 6; MC slope %.4f (>= %.4f)", hi / lo, fit.slope,
                  target)};
}

Outcome divergence() {
  const ScenarioParams sc = ScenarioParams::canonical();
  const ContradictionReport rep = contradiction_report(default_sweep(), sc);
  const double threshold = sc.growth_exponent() - 0.05;

  const ContradictionReport control = contradiction_report(negative_control_sweep(default_config()), sc);
  const bool ok = rep.normalized_ratio_fit.slope >= threshold && std::abs(control.normalized_ratio_fit.slope) <= 0.05 &&
                  !control.pass;
  return {ok, fmt("normalized ratio slope %.4f (>= %.2f); control slope %.2e, control verdict %s",
                  rep.normalized_ratio_fit.slope, threshold, control.normalized_ratio_fit.slope,
                  control.pass ? "PASS" : "FAIL")};
}

Outcome two_routes() {
  Outcome out;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const MultiplierSpec spec{1, 0.25, 6, seed};
    const double L = pow2_ceil(closed_form_radius(spec, closed_form_tail_tolerance));
    const Grid x(1, L, static_cast<Index>(64 * L));
    const SampledField closed = apply_closed_form(spec, x);
    const SampledField spectral = apply_spectral(sample_multiplier(spec, x.dual()), spec.K);
    const double rel = (closed.values() - spectral.values()).matrix().norm() / closed.values().matrix().norm();
    worst = std::max(worst, rel);
    out.detail += fmt("seed %d: %.2e (L=%g, P=%lld); ", static_cast<int>(seed), rel, L,
                      static_cast<long long>(x.points_per_axis()));
  }
  out.pass = worst <= 1e-6;
  out.detail = fmt("max relative L2 difference %.2e (<= 1e-6): ", worst) + out.detail;
  return out;
}

Outcome exhaustive_khintchine() {
  const ScenarioParams sc = ScenarioParams::canonical();
  const MultiplierSpec spec{1, sc.s, 4, 1};
  const std::int64_t signs = sign_count(spec);

  std::vector<Point> xs;
  for (int i = -200; i <= 200; ++i) xs.push_back(make_point(0.37 * i));
  const std::vector<double> mean = exhaustive_square_mean(spec, xs);
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double g = square_function(xs[i], spec);
    worst = std::max(worst, std::abs(mean[i] - g * g) / (g * g));
  }

  const KhintchineResult ex = khintchine_exhaustive(spec, sc.p);
  const KhintchineResult mc = khintchine_mc(spec, sc.p, 256);
  const double z = std::abs(mc.mean - ex.mean) / mc.standard_error;
  const bool ok = signs == 11 && worst <= 1e-10 && z <= 4.0;
  return {ok, fmt("%lld signs; pointwise E|Tf|^2 vs G^2 max rel %.2e (<= 1e-10); MC %.6g vs exhaustive %.6g, "
                  "%.2f standard errors (<= 4)",
                  static_cast<long long>(signs), worst, mc.mean, ex.mean, z)};
}

Outcome structural() {
  Outcome out;
  std::ostringstream detail;

  std::int64_t overlaps = 0;
  bool brute = true;
  for (int K = 1; K <= 6; ++K) {
    try {
      const DisjointnessReport rep = support_disjointness_check({1, 0.25, K, 1});
      overlaps += rep.overlaps;
      brute = brute && rep.brute_force;
    } catch (const InvariantViolation&) {
      ++overlaps;
    }
  }
  detail << "overlaps for K <= 6: " << overlaps << (brute ? " (brute force)" : " (not scanned)") << "; ";
  out.pass = overlaps == 0 && brute;

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> decade(-6.0, 6.0), angle(0.0, 2.0 * std::numbers::pi);
  double pu = 0.0;
  for (int dim : {1, 2}) {
    for (int i = 0; i < 100; ++i) {
      const double r = std::pow(10.0, decade(rng));
      const double a = angle(rng);
      const Point xi = dim == 1 ? make_point(r) : make_point(r * std::cos(a), r * std::sin(a));
      double sum = 0.0;
      for (int D = -50; D <= 50; ++D) sum += phi_lp(Point(std::ldexp(1.0, D) * xi));
      pu = std::max(pu, std::abs(sum - 1.0));
    }
  }
  detail << fmt("partition of unity residual %.2e; ", pu);
  out.pass = out.pass && pu < 1e-12;

  double rt = 0.0;
  for (int dim : {1, 2}) {
    const Grid g(dim, 8.0, dim == 1 ? 2048 : 256);
    std::normal_distribution<double> nd;
    ComplexArray v(g.size());
    for (Index i = 0; i < v.size(); ++i) v(i) = {nd(rng), nd(rng)};
    const SampledField f(g, v, Variable::space);
    const SampledField back = fourier_inverse(fourier_forward(f));
    rt = std::max(rt, (back.values() - v).abs().maxCoeff() / v.abs().maxCoeff());
  }
  detail << fmt("round trip %.2e; ", rt);
  out.pass = out.pass && rt < 1e-12;

  bool counts = true;
  for (int N = 1; N <= 14; ++N) counts = counts && index_set(N, 1).size() == (std::size_t(1) << (N - 1)) - 1;
  counts = counts && index_set(1, 2).ks == std::vector<LatticePoint>{{1, 2}, {2, 1}, {2, 2}};
  detail << "index sets " << (counts ? "match" : "differ");
  out.pass = out.pass && counts;
  out.detail = detail.str();
  return out;
}

// f^ is a sum of smooth bumps with random centers, widths and complex
// weights, supported in |xi| < 6.
struct BandLimited {
  struct Term {
    double center, width;
    std::complex<double> weight;
  };
  std::vector<Term> terms;

  double spectrum_abs_bound() const { return 6.0; }

  SampledField on(const Grid& space) const {
    const Grid freq = space.dual();
    const SampledField hat = SampledField::sample(freq, Variable::frequency, [this](const Point& xi) {
      std::complex<double> acc = 0.0;
      for (const Term& t : terms) acc += t.weight * psi_profile(std::abs(xi(0) - t.center) / t.width);
      return acc;
    });
    return fourier_inverse(hat);
  }
};

std::vector<BandLimited> field_family(int count) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> center(-4.5, 4.5), width(0.5, 2.0), unit(-1.0, 1.0);
  std::uniform_int_distribution<int> terms(1, 5);
  std::vector<BandLimited> out(count);
  for (auto& f : out) {
    const int t = terms(rng);
    for (int i = 0; i < t; ++i) f.terms.push_back({center(rng), width(rng), {unit(rng), unit(rng)}});
  }
  return out;
}

Outcome norm_sanity() {
  Outcome out;
  std::ostringstream detail;

  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  double lorentz = 0.0;
  for (int dim : {1, 2}) {
    const Grid g(dim, 4.0, dim == 1 ? 4096 : 128);
    ComplexArray v(g.size());
    for (Index i = 0; i < v.size(); ++i) v(i) = {nd(rng), nd(rng)};
    const SampledField f(g, v, Variable::space);
    for (double r : {1.5, 2.0, 3.0, 4.0})
      lorentz = std::max(lorentz, std::abs(lorentz_norm(f, r, r) - lp_norm(f, r)) / lp_norm(f, r));
  }
  detail << fmt("Lorentz diagonal vs Lebesgue max rel %.2e; ", lorentz);
  out.pass = lorentz <= 1e-13;

  const auto family = field_family(20);
  const Grid coarse(1, 32.0, 1024);
  const Grid fine(1, 64.0, 4096);
  for (double r : {2.0, 4.0}) {
    const SmoothnessParams params{0.25, r, std::nullopt};
    double min_coarse = infinity, min_fine = infinity, worst_field = 0.0;
    bool truncated = false;
    for (const auto& f : family) {
      const SampledField a = f.on(coarse), b = f.on(fine);
      const BesovNorm ba = besov_norm(a, params, 5), bb = besov_norm(b, params, 5);
      truncated = truncated || ba.truncation_warning || bb.truncation_warning;
      const double qa = ba.value / sobolev_norm(a, params);
      const double qb = bb.value / sobolev_norm(b, params);
      min_coarse = std::min(min_coarse, qa);
      min_fine = std::min(min_fine, qb);
      worst_field = std::max(worst_field, std::abs(qb / qa - 1.0));
    }
    const double drift = std::abs(min_fine / min_coarse - 1.0);
    const bool ok = min_coarse > 0.0 && min_fine > 0.0 && drift <= 0.1 && !truncated;
    out.pass = out.pass && ok;
    detail << fmt("r=%g: min Besov/Sobolev %.4f -> %.4f on the doubled grid (drift %.2e, worst field %.2e)%s; ", r,
                  min_coarse, min_fine, drift, worst_field, truncated ? " truncated" : "");
  }
  out.detail = detail.str();
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "multiplier norm bounded in K", norm_bounded_in_K},
      {2, "test function scaling", test_function_scaling},
      {3, "lower-bound growth", lower_bound_growth},
      {4, "normalized ratio diverges", divergence},
      {5, "spectral and closed-form routes agree", two_routes},
      {6, "exhaustive Khintchine oracle", exhaustive_khintchine},
      {7, "structural invariants", structural},
      {8, "norm sanity", norm_sanity},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
