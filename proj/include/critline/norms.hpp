#pragma once

// Smoothness norms and multiplier conditions: Bessel and Riesz potentials,
// L^r_s, the dilation-localized multiplier norm sup_D |phi(xi) m(2^D xi)|_{L^r_s},
// Mikhlin and Hormander-1960 diagnostics, B^s_{1,r}, Lorentz and
// Lorentz-Sobolev norms.

#include <optional>
#include <span>
#include <vector>

#include "critline/fit.hpp"
#include "critline/multiplier.hpp"
#include "critline/transforms.hpp"

namespace critline {

struct SmoothnessParams {
  double s = 0.25;
  double r = 2.0;
  std::optional<double> r2;  ///< second Lorentz exponent, may be infinity

  void validate() const;
};

/// (I - Delta)^{s/2}: symbol (1 + 4 pi^2 |w|^2)^{s/2}.
SampledField bessel_potential(const SampledField& field, double s);
/// (-Delta)^{s/2}: symbol (2 pi |w|)^s, zero bin annihilated.
SampledField riesz_potential(const SampledField& field, double s);

double sobolev_norm(const SampledField& field, const SmoothnessParams& params);

struct DRange {
  int lo;
  int hi;
};

struct NormGridOptions {
  double half_width = 16.0;
  /// Total sample budget per dilation (points_per_axis^n).
  Index max_points = Index(1) << 24;
  /// Extra halvings of the spacing, for self-convergence checks.
  int refine = 0;
};

struct DyadicNorm {
  int D;
  double value;
  double spacing;
  Index points;
};

struct HormanderNorm {
  double s = 0.0;
  double r = 0.0;
  double value = 0.0;  ///< sup over the D range
  int argmax_D = 0;
  std::vector<DyadicNorm> table;  ///< ascending D
};

/// sup_D |phi_lp(xi) m(2^D xi)|_{L^r_s} over D in [range.lo, range.hi].
HormanderNorm hormander_multiplier_norm(const Multiplier& m, const SmoothnessParams& params, DRange range,
                                        const NormGridOptions& options = {});

/// Same, sharing each Bessel image across several integrability exponents.
std::vector<HormanderNorm> hormander_multiplier_norms(const Multiplier& m, double s, std::span<const double> rs,
                                                      DRange range, const NormGridOptions& options = {});

/// Spacing and point count used for dilation D (exposed for reporting).
std::pair<double, Index> dyadic_norm_grid(const Multiplier& m, int D, const NormGridOptions& options);

inline int default_mikhlin_order(int dim) { return dim / 2 + 1; }

struct DerivativeBound {
  std::vector<int> alpha;
  double weighted_sup = 0.0;  ///< sup |xi|^{|alpha|} |d^alpha m(xi)|
  double raw_sup = 0.0;       ///< sup |d^alpha m(xi)|
  double argsup_radius = 0.0;  ///< |xi| where the weighted sup was attained
};

struct MikhlinOptions {
  double xi_min = 1e-3;
  double xi_max = 64.0;
  int samples = 4096;
  double step = 0.0;  ///< finite-difference step; 0 picks feature/8
};

std::vector<DerivativeBound> mikhlin_check(const Multiplier& m, int max_order, const MikhlinOptions& options = {});

struct AnnulusIntegrals {
  std::vector<int> alpha;
  std::vector<double> radii;
  std::vector<double> values;  ///< R^{-n+2|alpha|} int_{R<|xi|<2R} |d^alpha m|^2
  double sup = 0.0;
};

struct Hormander1960Options {
  double step = 0.0;  ///< quadrature and difference step; 0 picks feature/8
  Index max_nodes = Index(1) << 22;
};

std::vector<AnnulusIntegrals> hormander1960_check(const Multiplier& m, int max_order, std::span<const double> radii,
                                                  const Hormander1960Options& options = {});

struct BesovNorm {
  double value = 0.0;
  std::vector<double> pieces;   ///< 2^{ks} |(phi_k f^)v|_{L^r}
  double top_piece_mass = 0.0;  ///< spectral mass fraction of the k_max piece
  bool truncation_warning = false;
};

inline constexpr double besov_truncation_tolerance = 1e-10;

BesovNorm besov_norm(const SampledField& field, const SmoothnessParams& params, int k_max);

/// L^{r1,r2} from the exact integral of the step rearrangement; r2 may be infinity.
double lorentz_norm(const SampledField& field, double r1, double r2);
double lorentz_sobolev_norm(const SampledField& field, double s, double r1, double r2);

/// Log-log fit of |field| against |x| over lo <= |x| <= hi.
FitResult tail_decay_fit(const SampledField& field, double lo, double hi);

}  // namespace critline
