#pragma once

// The randomized multiplier
//
//   m(xi) = sum_{N=1}^{K} c_N sum_{k in I_N} a_{N,k} Psi(2^N xi - k),
//   c_N = 2^{-Ns} N^{-s},   I_N = {k in {1,2,...}^n : N 2^N < |k| < (N + 1/2) 2^N},
//
// with the Rademacher signs a_{N,k} drawn from a stateless hash of
// (seed, N, k). Bumps have pairwise disjoint supports, so a point lies in at
// most one of them and m can be evaluated in O(1).

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "critline/multiplier.hpp"
#include "critline/norms.hpp"
#include "critline/transforms.hpp"

namespace critline {

struct MultiplierSpec {
  int dim = 1;
  double s = 0.25;
  int K = 4;
  std::uint64_t seed = 1;

  void validate() const;
};

using LatticePoint = std::array<std::int64_t, 2>;

struct IndexSet {
  int N = 0;
  int dim = 1;
  std::vector<LatticePoint> ks;  ///< lexicographic, unused coordinates zero

  std::size_t size() const { return ks.size(); }
  bool contains(const LatticePoint& k) const;
};

/// Exact integer enumeration of I_N.
IndexSet index_set(int N, int dim);
/// |I_N| without listing it.
std::int64_t index_set_size(int N, int dim);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Rademacher sign a_{N,k} for a seed: +1 or -1.
int sign(std::uint64_t seed, int N, const LatticePoint& k);

/// Sign source: the seeded hash by default, or an explicit override.
class SignAssignment {
 public:
  using Override = std::function<int(int N, const LatticePoint& k)>;

  explicit SignAssignment(std::uint64_t seed) : seed_(seed) {}
  explicit SignAssignment(Override fn) : fn_(std::move(fn)) {}

  int operator()(int N, const LatticePoint& k) const { return fn_ ? fn_(N, k) : sign(seed_, N, k); }

 private:
  std::uint64_t seed_ = 0;
  Override fn_;
};

/// Signs laid out per scale, aligned with index_set(N).ks; pattern[N-1][i].
using SignPattern = std::vector<std::vector<std::int8_t>>;

SignPattern sign_pattern(const MultiplierSpec& spec, const SignAssignment& signs);
inline SignPattern sign_pattern(const MultiplierSpec& spec) { return sign_pattern(spec, SignAssignment(spec.seed)); }

double c_coeff(int N, double s);

struct Bump {
  int N;
  LatticePoint k;
};

/// The unique bump whose open support contains xi, if any.
std::optional<Bump> locate(const Point& xi, const MultiplierSpec& spec);

double eval_multiplier(const Point& xi, const MultiplierSpec& spec, const SignAssignment& signs);
inline double eval_multiplier(const Point& xi, const MultiplierSpec& spec) {
  return eval_multiplier(xi, spec, SignAssignment(spec.seed));
}

/// m as a Multiplier for the norm machinery; features are 2^{-N}.
Multiplier counterexample_multiplier(const MultiplierSpec& spec);

/// Dilations outside this window see m(2^D .) = 0 on the support of phi_lp.
DRange counterexample_D_range(int K);

struct DisjointnessReport {
  bool annuli_disjoint = true;
  bool brute_force = false;      ///< pointwise scan performed (K <= 6)
  std::int64_t samples = 0;
  std::int64_t covered = 0;      ///< samples inside exactly one bump
  std::int64_t overlaps = 0;     ///< samples inside two or more bumps
};

inline constexpr int brute_force_max_K = 6;

/// Checks the scale annuli (N - 1/4, N + 3/4) are pairwise disjoint and, for
/// K <= 6, counts bumps pointwise on a dense sample. Throws
/// InvariantViolation on any overlap.
DisjointnessReport support_disjointness_check(const MultiplierSpec& spec, std::int64_t samples = 10000);

/// Finest spacing / smallest box the multiplier grid must respect.
inline double multiplier_max_spacing(int K) { return std::ldexp(1.0, -K - 3); }

SampledField sample_multiplier(const MultiplierSpec& spec, const Grid& grid);
SampledField sample_multiplier(const MultiplierSpec& spec, const SignAssignment& signs, const Grid& grid);

}  // namespace critline
