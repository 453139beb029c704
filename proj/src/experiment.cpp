#include "critline/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "critline/counterexample.hpp"

namespace critline {

namespace {

using Points = std::vector<std::pair<double, double>>;

template <typename Fn>
Points column(const std::vector<SweepRecord>& records, int K_min, Fn&& fn) {
  Points pts;
  for (const auto& r : records)
    if (r.K >= K_min) pts.emplace_back(static_cast<double>(r.K), fn(r));
  return pts;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

nlohmann::json fit_json(const FitResult& f) {
  return {{"slope", f.slope},   {"intercept", f.intercept}, {"residual_max", f.residual_max},
          {"K_min", f.k_min},   {"K_max", f.k_max},         {"count", f.count}};
}

}  // namespace

void SweepConfig::validate() const {
  scenario.validate();
  if (K_list.empty()) throw InvalidArgument("K list is empty");
  for (std::size_t i = 0; i < K_list.size(); ++i) {
    if (K_list[i] < 2) throw InvalidArgument("every K must be >= 2");
    if (i > 0 && K_list[i] <= K_list[i - 1]) throw InvalidArgument("K list must be strictly ascending");
  }
  if (samples < 2) throw InvalidArgument("Monte Carlo needs at least 2 samples per K");
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config, const std::function<void(const SweepRecord&)>& on_record) {
  config.validate();
  const ScenarioParams& sc = config.scenario;
  std::vector<SweepRecord> records;
  for (int K : config.K_list) {
    const auto start = std::chrono::steady_clock::now();
    const MultiplierSpec spec{sc.dim, sc.s, K, config.seed};
    SweepRecord rec;
    rec.K = K;

    const HormanderNorm norm = hormander_multiplier_norm(counterexample_multiplier(spec), {sc.s, sc.r, std::nullopt},
                                                         counterexample_D_range(K), config.norm_grid);
    rec.sup_norm = norm.value;
    rec.argmax_D = norm.argmax_D;
    rec.norm_table = norm.table;

    rec.f_norm = f_lp_norm(K, sc.p, sc.dim);
    const KhintchineResult mc = khintchine_mc(spec, sc.p, config.samples);
    rec.mc_mean = mc.mean;
    rec.mc_stderr = mc.standard_error;
    rec.quadrature = mc.quadrature;
    rec.square_functional = square_functional(spec, sc.p, mc.quadrature);
    rec.partial_sum = lower_bound_partial_sum(K, sc);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_record) on_record(rec);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<SweepRecord> negative_control_sweep(const SweepConfig& config) {
  config.validate();
  const ScenarioParams& sc = config.scenario;
  const HormanderNorm norm =
      hormander_multiplier_norm(constant_multiplier(sc.dim, 1.0), {sc.s, sc.r, std::nullopt}, {-2, 2}, config.norm_grid);
  std::vector<SweepRecord> records;
  for (int K : config.K_list) {
    const auto start = std::chrono::steady_clock::now();
    SweepRecord rec;
    rec.K = K;
    rec.sup_norm = norm.value;
    rec.argmax_D = norm.argmax_D;
    rec.norm_table = norm.table;
    rec.f_norm = f_lp_norm(K, sc.p, sc.dim);
    // T f = f: the "operator" side is |f|_p^p measured by direct quadrature.
    rec.mc_mean = std::pow(f_lp_norm(K, sc.p, sc.dim, NormMode::direct), sc.p);
    rec.mc_stderr = 0.0;
    rec.square_functional = rec.mc_mean;
    rec.partial_sum = lower_bound_partial_sum(K, sc);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    records.push_back(std::move(rec));
  }
  return records;
}

double ratio_stderr(const SweepRecord& record, double p) {
  // d(mean^{1/p}) = (1/p) mean^{1/p - 1} d(mean)
  return std::pow(record.mc_mean, 1.0 / p - 1.0) / p * record.mc_stderr / record.f_norm;
}

ContradictionReport contradiction_report(const std::vector<SweepRecord>& records, const ScenarioParams& scenario,
                                         const ReportOptions& options) {
  scenario.validate();
  if (records.size() < 4) throw InvalidData("the report needs at least 4 sweep records");
  const double p = scenario.p;
  const double n = scenario.dim;
  ContradictionReport rep;
  rep.records = records;
  rep.target_slope = scenario.growth_exponent();

  rep.normalized_ratio_fit =
      fit_exponent(column(records, options.fit_K_min, [p](const SweepRecord& r) { return r.normalized_ratio(p); }));
  rep.norm_fit = fit_exponent(column(records, 0, [](const SweepRecord& r) { return r.sup_norm; }));
  rep.f_power_fit = fit_exponent(column(records, 0, [p](const SweepRecord& r) { return std::pow(r.f_norm, p); }));
  rep.mc_fit = fit_exponent(column(records, options.fit_K_min, [](const SweepRecord& r) { return r.mc_mean; }));

  double lo = infinity, hi = 0.0;
  for (const auto& r : records) {
    if (r.K < options.fit_K_min) continue;
    const double q = r.square_functional / r.partial_sum;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  rep.proxy_ratio_spread = hi / lo;

  for (std::size_t i = 1; i < records.size(); ++i) {
    const double drop = records[i - 1].ratio(p) - records[i].ratio(p);
    const double noise = 2.0 * std::hypot(ratio_stderr(records[i - 1], p), ratio_stderr(records[i], p));
    if (drop > noise) ++rep.inversions;
  }

  const double ratio_threshold = rep.target_slope - options.slope_tolerance;
  auto add = [&](std::string name, bool pass, double value, double threshold, std::string detail) {
    rep.checks.push_back({std::move(name), pass, value, threshold, std::move(detail)});
  };
  add("normalized-ratio-growth", rep.normalized_ratio_fit.slope >= ratio_threshold, rep.normalized_ratio_fit.slope,
      ratio_threshold, "slope of R(K)/sup_D norm must reach 1/p - 1/2 - tol");
  add("norm-flatness", std::abs(rep.norm_fit.slope) <= options.slope_tolerance, rep.norm_fit.slope,
      options.slope_tolerance, "|slope| of the sup_D multiplier norm");
  add("norm-flatness-residual", rep.norm_fit.residual_max <= options.flat_residual, rep.norm_fit.residual_max,
      options.flat_residual, "max log residual of the sup_D norm fit");
  add("f-power-exact", std::abs(rep.f_power_fit.slope - (n * p - n)) <= options.exact_residual &&
                           rep.f_power_fit.residual_max <= options.exact_residual,
      rep.f_power_fit.slope, n * p - n, "|f|_p^p follows K^{np-n}");
  const double mc_threshold = scenario.critical_exponent() + 1.0 - options.mc_slope_tolerance;
  add("mc-growth", rep.mc_fit.slope >= mc_threshold, rep.mc_fit.slope, mc_threshold,
      "slope of the mean |T f|_p^p against np - n - p/2 + 1 - tol");
  add("partial-sum-proxy", rep.proxy_ratio_spread <= options.proxy_ratio_limit, rep.proxy_ratio_spread,
      options.proxy_ratio_limit, "max/min of int G^p over the partial sum");
  add("monotone-divergence", rep.inversions <= 1, rep.inversions, 1.0,
      "R(K) decreases by more than 2 standard errors at most once");

  rep.pass = rep.checks[0].pass && rep.checks[1].pass;
  return rep;
}

nlohmann::json to_json(const SweepConfig& config) {
  const auto& sc = config.scenario;
  return {{"scenario", {{"n", sc.dim}, {"p", sc.p}, {"s", sc.s}, {"r", sc.r}}},
          {"K_list", config.K_list},
          {"seed", config.seed},
          {"M", config.samples},
          {"norm_grid",
           {{"half_width", config.norm_grid.half_width},
            {"max_points", config.norm_grid.max_points},
            {"refine", config.norm_grid.refine}}}};
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  SweepConfig c;
  try {
    if (j.contains("scenario")) {
      const auto& s = j.at("scenario");
      c.scenario.dim = s.value("n", c.scenario.dim);
      c.scenario.p = s.value("p", c.scenario.p);
      c.scenario.s = s.value("s", c.scenario.s);
      c.scenario.r = s.value("r", c.scenario.r);
    }
    c.K_list = j.value("K_list", c.K_list);
    c.seed = j.value("seed", c.seed);
    c.samples = j.value("M", c.samples);
    if (j.contains("norm_grid")) {
      const auto& g = j.at("norm_grid");
      c.norm_grid.half_width = g.value("half_width", c.norm_grid.half_width);
      c.norm_grid.max_points = g.value("max_points", c.norm_grid.max_points);
      c.norm_grid.refine = g.value("refine", c.norm_grid.refine);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad sweep configuration: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const SweepRecord& r) {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& d : r.norm_table)
    table.push_back({{"D", d.D}, {"value", d.value}, {"spacing", d.spacing}, {"points", d.points}});
  return {{"K", r.K},
          {"sup_norm", r.sup_norm},
          {"argmax_D", r.argmax_D},
          {"norm_table", table},
          {"f_norm", r.f_norm},
          {"mc_mean", r.mc_mean},
          {"mc_stderr", r.mc_stderr},
          {"square_functional", r.square_functional},
          {"partial_sum", r.partial_sum},
          {"quadrature", {{"spacing", r.quadrature.spacing}, {"radius", r.quadrature.radius}}}};
}

SweepRecord sweep_record_from_json(const nlohmann::json& j) {
  SweepRecord r;
  try {
    r.K = j.at("K").get<int>();
    r.sup_norm = j.at("sup_norm").get<double>();
    r.argmax_D = j.at("argmax_D").get<int>();
    for (const auto& d : j.at("norm_table"))
      r.norm_table.push_back(
          {d.at("D").get<int>(), d.at("value").get<double>(), d.at("spacing").get<double>(), d.at("points").get<Index>()});
    r.f_norm = j.at("f_norm").get<double>();
    r.mc_mean = j.at("mc_mean").get<double>();
    r.mc_stderr = j.at("mc_stderr").get<double>();
    r.square_functional = j.at("square_functional").get<double>();
    r.partial_sum = j.at("partial_sum").get<double>();
    r.quadrature.spacing = j.at("quadrature").at("spacing").get<double>();
    r.quadrature.radius = j.at("quadrature").at("radius").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidData(std::string("bad sweep record: ") + e.what());
  }
  if (!(r.sup_norm > 0 && r.f_norm > 0 && r.mc_mean > 0 && r.square_functional > 0 && r.partial_sum > 0))
    throw InvalidData("sweep record for K = " + std::to_string(r.K) + " has nonpositive entries");
  return r;
}

nlohmann::json to_json(const ContradictionReport& rep, const ScenarioParams& scenario) {
  const double p = scenario.p;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks)
    checks.push_back(
        {{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold}, {"detail", c.detail}});
  nlohmann::json table = nlohmann::json::array();
  for (const auto& r : rep.records)
    table.push_back({{"K", r.K},
                     {"sup_norm", r.sup_norm},
                     {"f_norm", r.f_norm},
                     {"mc_mean", r.mc_mean},
                     {"mc_stderr", r.mc_stderr},
                     {"R", r.ratio(p)},
                     {"R_stderr", ratio_stderr(r, p)},
                     {"R_over_norm", r.normalized_ratio(p)},
                     {"square_functional", r.square_functional},
                     {"partial_sum", r.partial_sum}});
  return {{"verdict", rep.pass ? "PASS" : "FAIL"},
          {"conclusion", rep.pass ? "no constant C bounds |T f|_p by C sup_D norm |f|_p across K"
                                  : "the sweep does not exhibit the divergence"},
          {"target_slope", rep.target_slope},
          {"fits",
           {{"normalized_ratio", fit_json(rep.normalized_ratio_fit)},
            {"sup_norm", fit_json(rep.norm_fit)},
            {"f_power", fit_json(rep.f_power_fit)},
            {"mc_mean", fit_json(rep.mc_fit)}}},
          {"proxy_ratio_spread", rep.proxy_ratio_spread},
          {"inversions", rep.inversions},
          {"checks", checks},
          {"table", table}};
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records, const ScenarioParams& scenario,
                     const std::string& config_hash) {
  const double p = scenario.p;
  out << "config_hash,K,sup_norm,argmax_D,f_norm,mc_mean,mc_stderr,square_functional,partial_sum,R,R_over_norm,"
         "x_spacing,x_radius\n";
  for (const auto& r : records) {
    out << config_hash << ',' << r.K << ',' << format_double(r.sup_norm) << ',' << r.argmax_D << ','
        << format_double(r.f_norm) << ',' << format_double(r.mc_mean) << ',' << format_double(r.mc_stderr) << ','
        << format_double(r.square_functional) << ',' << format_double(r.partial_sum) << ','
        << format_double(r.ratio(p)) << ',' << format_double(r.normalized_ratio(p)) << ','
        << format_double(r.quadrature.spacing) << ',' << format_double(r.quadrature.radius) << '\n';
  }
}

void write_gnuplot(std::ostream& out, const std::string& quantity, const std::vector<std::pair<int, double>>& points,
                   const FitResult& fit, const std::string& config_hash) {
  out << "# config_hash " << config_hash << '\n';
  out << "# " << quantity << " vs K; fitted slope " << format_double(fit.slope) << ", intercept "
      << format_double(fit.intercept) << '\n';
  out << "# K " << quantity << '\n';
  for (const auto& [K, v] : points) out << K << ' ' << format_double(v) << '\n';
}

}  // namespace critline
