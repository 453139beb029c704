#pragma once

// The multiplier operator T f = F^{-1}(m f^) on the test function
// f^(xi) = phi_test(xi / K), which equals 1 on the support of m. Two routes:
// a spectral one (sample m, multiply, inverse FFT) and a closed form
//
//   T f(x) = sum_N c_N 2^{-nN} F^{-1}Psi(x / 2^N) sum_{k in I_N} a_{N,k} e^{2 pi i x.k / 2^N},
//
// plus the square function G(x) = (sum_N c_N^2 2^{-2nN} |I_N| |F^{-1}Psi(x/2^N)|^2)^{1/2}
// and Monte Carlo / exhaustive estimates of E int |T f|^p.

#include <cstdint>
#include <span>
#include <vector>

#include "critline/bumps.hpp"
#include "critline/counterexample.hpp"
#include "critline/transforms.hpp"

namespace critline {

struct ScenarioParams {
  int dim = 1;
  double p = 4.0 / 3.0;
  double s = 0.25;
  double r = 2.0;

  /// Exponent e1 = np - n - p/2 of the lower-bound partial sum.
  double critical_exponent() const { return dim * p - dim - p / 2.0; }
  /// 1/p - 1/2, the growth rate the normalized L^p norm must show in log K.
  double growth_exponent() const { return 1.0 / p - 0.5; }
  void validate() const;

  static ScenarioParams canonical() { return {}; }
};

inline constexpr double critical_line_tolerance = 1e-12;

template <typename Derived>
double test_function_hat(const Eigen::MatrixBase<Derived>& xi, int K) {
  return phi_test_profile(xi.norm() / K);
}

enum class NormMode { scaling, direct };

/// |F^{-1}phi_test|_{L^p}, cached per (dim, p).
double reference_test_norm(int dim, double p);
/// |f|_{L^p} with f^ = phi_test(. / K).
double f_lp_norm(int K, double p, int dim = 1, NormMode mode = NormMode::scaling);

SampledField apply_spectral(const SampledField& m, const SampledField& f_hat);
/// Uses f^ = phi_test(. / K) sampled on the multiplier grid.
SampledField apply_spectral(const SampledField& m, int K);

/// Nonincreasing majorant of |T f(x)| over all sign patterns at |x| = r.
double closed_form_envelope(const MultiplierSpec& spec, double r);
/// Smallest radius past which closed_form_envelope stays below `level`.
double closed_form_radius(const MultiplierSpec& spec, double level);

inline constexpr double closed_form_tail_tolerance = 1e-12;

/// T f on a space grid. The grid spacing must divide every 2^N, be at most
/// 1/(4(K+1)), and the box must reach closed_form_radius(tolerance).
SampledField apply_closed_form(const MultiplierSpec& spec, const SignAssignment& signs, const Grid& grid,
                               double tolerance = closed_form_tail_tolerance);
inline SampledField apply_closed_form(const MultiplierSpec& spec, const Grid& grid,
                                      double tolerance = closed_form_tail_tolerance) {
  return apply_closed_form(spec, SignAssignment(spec.seed), grid, tolerance);
}

/// T f(x) by direct summation over every bump.
std::complex<double> closed_form_at(const Point& x, const MultiplierSpec& spec, const SignAssignment& signs);

double square_function(const Point& x, const MultiplierSpec& spec);

/// Quadrature for int |T f|^p: step `spacing` (a power of two) out to `radius`.
struct LpQuadrature {
  double spacing = 0.0;
  double radius = 0.0;
};

LpQuadrature lp_quadrature(const MultiplierSpec& spec, double p, double tolerance = closed_form_tail_tolerance);

/// int G^p.
double square_functional(const MultiplierSpec& spec, double p, const LpQuadrature& quad);

/// int |T f|^p for each sign pattern. Results do not depend on the thread count.
std::vector<double> lp_power_batch(const MultiplierSpec& spec, std::span<const SignPattern> patterns, double p,
                                   const LpQuadrature& quad);

/// Per-sample seeds derived from a master seed by counter.
std::vector<std::uint64_t> derive_seeds(std::uint64_t master, int count);

struct KhintchineResult {
  double mean = 0.0;
  double standard_error = 0.0;
  std::vector<std::uint64_t> seeds;  ///< empty for exhaustive enumeration
  std::vector<double> values;        ///< int |T f|^p per sample
  LpQuadrature quadrature;
};

/// Monte Carlo estimate of E int |T f|^p over `samples` seeds derived from spec.seed.
KhintchineResult khintchine_mc(const MultiplierSpec& spec, double p, int samples);

inline constexpr int exhaustive_max_signs = 20;

/// Number of Rademacher variables sum_N |I_N|.
std::int64_t sign_count(const MultiplierSpec& spec);

/// The t-th of the 2^sign_count() sign patterns (bit i of t is sign i).
SignPattern enumerated_pattern(const MultiplierSpec& spec, std::uint64_t t);

/// Exact mean of int |T f|^p over all sign patterns.
KhintchineResult khintchine_exhaustive(const MultiplierSpec& spec, double p);

/// Exact mean of |T f(x)|^2 over all sign patterns at each point.
std::vector<double> exhaustive_square_mean(const MultiplierSpec& spec, std::span<const Point> xs);

/// sum_{N=1}^{K} N^{e1}.
double lower_bound_partial_sum(int K, const ScenarioParams& params);

struct ShellRow {
  int N = 0;
  double inner = 0.0;       ///< A 2^N
  double full = 0.0;        ///< int over the shell of G^p
  double restricted = 0.0;  ///< same with only the scale-N term of G
  double predicted = 0.0;   ///< c_N^p N^{(n-1)p/2} 2^{nN(1 - p/2)}
  double ratio() const { return full / predicted; }
};

/// Shell integrals over {A 2^N <= |x| < 2 A 2^N}, N = 1..K.
std::vector<ShellRow> shell_table(const MultiplierSpec& spec, double p, double A, double step);

}  // namespace critline
