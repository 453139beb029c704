#pragma once

// K-sweeps over the counterexample family and the end-to-end report: the
// multiplier norm stays flat in K while the normalized operator ratio grows
// like K^{1/p - 1/2}, so no single constant bounds both.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "critline/fit.hpp"
#include "critline/norms.hpp"
#include "critline/operator.hpp"

namespace critline {

struct SweepConfig {
  ScenarioParams scenario = ScenarioParams::canonical();
  std::vector<int> K_list{4, 6, 8, 10, 12};
  std::uint64_t seed = 1;
  int samples = 64;  ///< Monte Carlo draws per K
  NormGridOptions norm_grid;

  void validate() const;
};

struct SweepRecord {
  int K = 0;
  double sup_norm = 0.0;  ///< sup_D |phi_lp m(2^D .)|_{L^r_s}
  int argmax_D = 0;
  std::vector<DyadicNorm> norm_table;
  double f_norm = 0.0;  ///< |f|_{L^p}
  double mc_mean = 0.0;  ///< mean of |T f|_p^p over the draws
  double mc_stderr = 0.0;
  double square_functional = 0.0;  ///< int G^p
  double partial_sum = 0.0;        ///< sum_{N<=K} N^{e1}
  LpQuadrature quadrature;
  double wall_seconds = 0.0;  ///< not serialized to tables

  /// R(K) = mc_mean^{1/p} / |f|_p.
  double ratio(double p) const { return std::pow(mc_mean, 1.0 / p) / f_norm; }
  double normalized_ratio(double p) const { return ratio(p) / sup_norm; }
};

/// One record per K, in order. `on_record` sees each record as soon as it is
/// complete so callers can persist partial sweeps.
std::vector<SweepRecord> run_sweep(const SweepConfig& config,
                                   const std::function<void(const SweepRecord&)>& on_record = {});

/// Records for the multiplier m = 1, which reproduces f: R(K) = 1 and the
/// norm is the same fixed bump at every K.
std::vector<SweepRecord> negative_control_sweep(const SweepConfig& config);

struct ReportOptions {
  int fit_K_min = 6;
  double slope_tolerance = 0.05;
  double flat_residual = 0.1;
  double proxy_ratio_limit = 1.3;
  double mc_slope_tolerance = 0.1;
  double exact_residual = 1e-6;
};

struct ReportCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ContradictionReport {
  double target_slope = 0.0;  ///< 1/p - 1/2
  FitResult normalized_ratio_fit;
  FitResult norm_fit;
  FitResult f_power_fit;
  FitResult mc_fit;
  double proxy_ratio_spread = 0.0;  ///< max/min of int G^p / partial sum, K >= fit_K_min
  int inversions = 0;               ///< R(K) decreases beyond 2 standard errors
  bool pass = false;
  std::vector<ReportCheck> checks;
  std::vector<SweepRecord> records;
};

/// PASS when the normalized-ratio slope is >= 1/p - 1/2 - tol and the norm
/// slope magnitude is <= tol; the remaining checks are reported alongside.
ContradictionReport contradiction_report(const std::vector<SweepRecord>& records, const ScenarioParams& scenario,
                                         const ReportOptions& options = {});

/// Standard error of R(K) propagated from the Monte Carlo mean.
double ratio_stderr(const SweepRecord& record, double p);

nlohmann::json to_json(const SweepConfig& config);
SweepConfig sweep_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepRecord& record);
SweepRecord sweep_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ContradictionReport& report, const ScenarioParams& scenario);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records, const ScenarioParams& scenario,
                     const std::string& config_hash);
/// Two-column "K value" data, one file per fitted quantity.
void write_gnuplot(std::ostream& out, const std::string& quantity, const std::vector<std::pair<int, double>>& points,
                   const FitResult& fit, const std::string& config_hash);

}  // namespace critline
