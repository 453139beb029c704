#pragma once

// Fixed smooth cutoffs and their tabulated inverse Fourier transforms.
//
//   smooth_step  sigma(t) = h(t) / (h(t) + h(1 - t)),  h(t) = exp(-1/t) for t > 0
//   psi          exp(1 - 1/(1 - |2 xi|^2)) on |xi| < 1/2
//   phi_lp       u(|xi|) - u(|xi|/2),  u(t) = sigma(2t - 1); dyadic partition
//   phi_test     1 - sigma(|xi| - 2); plateau on |xi| <= 2, support |xi| < 3
//   besov_cutoff phi_0(x) = 1 - sigma(2|x| - 2), phi_k = phi_0(2^-k x) - phi_0(2^(1-k) x)

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "critline/transforms.hpp"

namespace critline {

double smooth_step(double t);

double psi_profile(double r);
double phi_lp_profile(double r);
double phi_test_profile(double r);
double besov_cutoff_profile(int k, double r);

template <typename Derived>
double psi(const Eigen::MatrixBase<Derived>& xi) { return psi_profile(xi.norm()); }
template <typename Derived>
double phi_lp(const Eigen::MatrixBase<Derived>& xi) { return phi_lp_profile(xi.norm()); }
template <typename Derived>
double phi_test(const Eigen::MatrixBase<Derived>& xi) { return phi_test_profile(xi.norm()); }
template <typename Derived>
double besov_cutoff(int k, const Eigen::MatrixBase<Derived>& x) { return besov_cutoff_profile(k, x.norm()); }

/// A radial cutoff together with a dense table of its inverse Fourier
/// transform F^{-1}b(x) = int b(xi) exp(2 pi i x.xi) dxi, which is radial,
/// real and even. The table holds samples of the radial profile and its
/// derivative on [0, range) and is read with cubic Hermite interpolation.
class BumpTable {
 public:
  struct Options {
    double spacing = 1.0 / 64.0;  ///< table step in |x|
    double cutoff = 1e-14;        ///< tabulate until the envelope drops below this
  };

  static BumpTable build(std::string name, int dim, std::function<double(double)> profile,
                         double support_radius, Options options);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double support_radius() const { return support_radius_; }
  double spacing() const { return spacing_; }
  /// Radius past which the inverse transform is reported as 0.
  double range() const { return range_; }

  double analytic(double r) const { return profile_(r); }
  template <typename Derived>
  double analytic(const Eigen::MatrixBase<Derived>& xi) const { return profile_(xi.norm()); }

  /// F^{-1}b at radius r >= 0.
  double inverse_radial(double r) const {
    if (r >= range_) return 0.0;
    const double t = r / spacing_;
    const auto i = static_cast<std::size_t>(t);
    const double u = t - static_cast<double>(i);
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * values_[i] + (u3 - 2 * u2 + u) * spacing_ * slopes_[i] +
           (-2 * u3 + 3 * u2) * values_[i + 1] + (u3 - u2) * spacing_ * slopes_[i + 1];
  }

  template <typename Derived>
  std::complex<double> inverse(const Eigen::MatrixBase<Derived>& x) const {
    return {inverse_radial(x.norm()), 0.0};
  }

  /// Nonincreasing majorant of |F^{-1}b| on [r, infinity).
  double envelope(double r) const {
    if (r >= range_) return 0.0;
    return envelope_[static_cast<std::size_t>(r / spacing_)];
  }

  /// Tabulated samples on the nonnegative half axis, one per table step.
  const std::vector<double>& samples() const { return values_; }

  /// The table as a space field on the symmetric grid that holds it.
  SampledField tabulated() const;

 private:
  std::string name_;
  int dim_ = 1;
  std::function<double(double)> profile_;
  double support_radius_ = 0.0;
  double spacing_ = 0.0;
  double range_ = 0.0;
  std::vector<double> values_;
  std::vector<double> slopes_;
  std::vector<double> envelope_;
};

/// Shared, lazily built tables (thread-safe initialization).
const BumpTable& psi_table(int dim);
const BumpTable& phi_test_table(int dim);

/// F^{-1}Psi(x) through psi_table(x.size()).
template <typename Derived>
std::complex<double> inv_fourier_psi(const Eigen::MatrixBase<Derived>& x) {
  return psi_table(static_cast<int>(x.size())).inverse(x);
}

struct Annulus {
  double A;          ///< F^{-1}Psi does not vanish on {A <= |y| < 2A}
  double min_abs;    ///< min |F^{-1}Psi| over the sampled annulus
  double threshold;  ///< required lower bound, a fraction of |F^{-1}Psi(0)|
};

inline constexpr double annulus_threshold_fraction = 1e-3;

/// Largest A in {2^-j : 0 <= j <= 12} whose annulus clears the threshold.
Annulus find_annulus(const BumpTable& table);

}  // namespace critline
