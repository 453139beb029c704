// critline: command-line driver for the critical-line multiplier experiments.

#include <fftw3.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "critline/bumps.hpp"
#include "critline/config.hpp"
#include "critline/counterexample.hpp"
#include "critline/experiment.hpp"
#include "critline/io.hpp"
#include "critline/norms.hpp"
#include "critline/operator.hpp"
#include "critline/parallel.hpp"

#ifndef CRITLINE_VERSION
#define CRITLINE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace critline;

namespace {

enum ExitCode { ok = 0, usage = 1, invariant = 2, resolution = 3 };

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<int>> K_list;
  std::optional<int> M;
  std::optional<int> n;
  std::optional<double> p, s, r;
};

struct Run {
  Config config;
  std::string hash;
  fs::path out;
  std::string command;
  std::string started;
  std::chrono::steady_clock::time_point clock = std::chrono::steady_clock::now();
  json outputs = json::array();
  json details = json::object();
};

Config resolve(const Overrides& o) {
  Config c = o.config_path.empty() ? Config{} : load_config(o.config_path);
  auto& sc = c.sweep.scenario;
  if (o.out) c.output_dir = *o.out;
  if (o.threads) c.threads = *o.threads;
  if (o.seed) c.sweep.seed = *o.seed;
  if (o.K_list) c.sweep.K_list = *o.K_list;
  if (o.M) c.sweep.samples = *o.M;
  if (o.n) sc.dim = *o.n;
  if (o.p) sc.p = *o.p;
  if (o.s) sc.s = *o.s;
  if (o.r) sc.r = *o.r;
  // A scenario given only by p picks s on the critical line.
  if (o.p && !o.s) sc.s = sc.dim * std::abs(1.0 / sc.p - 0.5);
  c.validate();
  return c;
}

void write_json(Run& run, const std::string& name, const json& j) {
  std::ofstream f(run.out / name);
  if (!f) throw InvalidArgument("cannot write " + (run.out / name).string());
  f << j.dump(2) << '\n';
  run.outputs.push_back(name);
}

std::ofstream open_output(Run& run, const std::string& name, bool binary = false) {
  std::ofstream f(run.out / name, binary ? std::ios::binary : std::ios::out);
  if (!f) throw InvalidArgument("cannot write " + (run.out / name).string());
  run.outputs.push_back(name);
  return f;
}

void write_manifest(const Run& run, const std::string& status) {
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - run.clock).count();
  json m{{"tool", "critline"},
         {"command", run.command},
         {"status", status},
         {"config_hash", run.hash},
         {"config", canonical_json(run.config)},
         {"seeds", {{"master", run.config.sweep.seed}, {"derived", derive_seeds(run.config.sweep.seed, run.config.sweep.samples)}}},
         {"versions",
          {{"critline", CRITLINE_VERSION},
           {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION)},
           {"fftw", std::string(fftw_version)},
           {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                 std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                 std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
         {"threads", thread_count()},
         {"started", run.started},
         {"finished", utc_now()},
         {"wall_seconds", wall},
         {"outputs", run.outputs},
         {"details", run.details}};
  std::ofstream f(run.out / ("manifest-" + run.command + ".json"));
  f << m.dump(2) << '\n';
}

int top_K(const Config& c) { return c.sweep.K_list.back(); }

MultiplierSpec spec_for(const Config& c, int K) {
  return {c.sweep.scenario.dim, c.sweep.scenario.s, K, c.sweep.seed};
}

double ceil_pow2(double v) { return std::ldexp(1.0, static_cast<int>(std::ceil(std::log2(v)))); }

// ---------------------------------------------------------------------------

void cmd_gen_multiplier(Run& run, int K) {
  const MultiplierSpec spec = spec_for(run.config, K);
  const double h = multiplier_max_spacing(K);
  const double L = ceil_pow2(K + 1.0);
  const auto P = static_cast<Index>(2.0 * L / h);
  const Index total = spec.dim == 1 ? P : P * P;
  if (total > run.config.sweep.norm_grid.max_points)
    throw ResolutionError("multiplier grid needs " + std::to_string(total) + " samples, budget is " +
                          std::to_string(run.config.sweep.norm_grid.max_points));
  const SampledField m = sample_multiplier(spec, Grid(spec.dim, L, P));
  auto bin = open_output(run, "multiplier.bin", true);
  write_field(bin, m);
  write_json(run, "multiplier.json",
             {{"config_hash", run.hash},
              {"spec", {{"n", spec.dim}, {"s", spec.s}, {"K", spec.K}, {"seed", spec.seed}}},
              {"grid", {{"n", spec.dim}, {"half_width", L}, {"points_per_axis", P}, {"spacing", h}}},
              {"sup_norm", lp_norm(m, infinity)},
              {"sup_bound", std::pow(2.0, -spec.s)},
              {"support", {{"inner", 0.75}, {"outer", K + 0.75}}},
              {"naturals", "k ranges over {1, 2, ...}^n"}});
}

void cmd_norm(Run& run, int K, std::vector<double> rs) {
  const auto& sc = run.config.sweep.scenario;
  if (rs.empty()) rs.push_back(sc.r);
  const MultiplierSpec spec = spec_for(run.config, K);
  const DRange range = counterexample_D_range(K);
  const auto norms = hormander_multiplier_norms(counterexample_multiplier(spec), sc.s, rs, range,
                                                run.config.sweep.norm_grid);
  auto csv = open_output(run, "norm.csv");
  csv << "config_hash,r,D,value,spacing,points\n" << std::setprecision(17);
  json summary = json::array();
  for (const auto& h : norms) {
    for (const auto& d : h.table)
      csv << run.hash << ',' << h.r << ',' << d.D << ',' << d.value << ',' << d.spacing << ',' << d.points << '\n';
    summary.push_back({{"r", h.r}, {"sup", h.value}, {"argmax_D", h.argmax_D}});
  }
  write_json(run, "norm.json",
             {{"config_hash", run.hash},
              {"K", K},
              {"s", sc.s},
              {"D_range", {range.lo, range.hi}},
              {"half_width", run.config.sweep.norm_grid.half_width},
              {"norms", summary}});
  for (const auto& h : norms) std::cout << "r = " << h.r << ": sup_D norm " << h.value << " at D = " << h.argmax_D << '\n';
}

void cmd_apply(Run& run, int K, const std::string& route) {
  const auto& sc = run.config.sweep.scenario;
  const MultiplierSpec spec = spec_for(run.config, K);
  const LpQuadrature quad = lp_quadrature(spec, sc.p);
  const double L = ceil_pow2(closed_form_radius(spec, closed_form_tail_tolerance));
  const auto P = static_cast<Index>(2.0 * L / quad.spacing);
  const Index total = spec.dim == 1 ? P : P * P;
  if (total > run.config.sweep.norm_grid.max_points)
    throw ResolutionError("operator grid needs " + std::to_string(total) + " samples, budget is " +
                          std::to_string(run.config.sweep.norm_grid.max_points));
  const Grid x_grid(spec.dim, L, P);
  SampledField Tf = route == "spectral" ? apply_spectral(sample_multiplier(spec, x_grid.dual()), K)
                                        : apply_closed_form(spec, x_grid);
  auto bin = open_output(run, "Tf.bin", true);
  write_field(bin, Tf);
  const double Tf_norm = lp_norm(Tf, sc.p);
  const double f_norm = f_lp_norm(K, sc.p, sc.dim);
  write_json(run, "apply.json",
             {{"config_hash", run.hash},
              {"route", route},
              {"K", K},
              {"seed", spec.seed},
              {"grid", {{"n", spec.dim}, {"half_width", L}, {"points_per_axis", P}}},
              {"Tf_lp_norm", Tf_norm},
              {"f_lp_norm", f_norm},
              {"ratio", Tf_norm / f_norm}});
  std::cout << "|T f|_p = " << Tf_norm << ", |f|_p = " << f_norm << '\n';
}

void cmd_khintchine(Run& run, int K, int samples, bool exhaustive) {
  const auto& sc = run.config.sweep.scenario;
  const MultiplierSpec spec = spec_for(run.config, K);
  const KhintchineResult res = exhaustive ? khintchine_exhaustive(spec, sc.p) : khintchine_mc(spec, sc.p, samples);
  const double G = square_functional(spec, sc.p, res.quadrature);
  const Annulus annulus = find_annulus(psi_table(sc.dim));
  const auto shells = shell_table(spec, sc.p, annulus.A, res.quadrature.spacing);
  auto csv = open_output(run, "shells.csv");
  csv << "config_hash,N,inner_radius,full,restricted,predicted,ratio\n" << std::setprecision(17);
  for (const auto& row : shells)
    csv << run.hash << ',' << row.N << ',' << row.inner << ',' << row.full << ',' << row.restricted << ','
        << row.predicted << ',' << row.ratio() << '\n';
  write_json(run, "khintchine.json",
             {{"config_hash", run.hash},
              {"K", K},
              {"p", sc.p},
              {"mode", exhaustive ? "exhaustive" : "monte-carlo"},
              {"samples", res.values.size()},
              {"mean", res.mean},
              {"standard_error", res.standard_error},
              {"square_functional", G},
              {"mean_over_square_functional", res.mean / G},
              {"seeds", res.seeds},
              {"values", res.values},
              {"quadrature", {{"spacing", res.quadrature.spacing}, {"radius", res.quadrature.radius}}},
              {"annulus_A", annulus.A}});
  std::cout << "mean |T f|_p^p = " << res.mean << " +- " << res.standard_error << ", int G^p = " << G << '\n';
}

bool cmd_verify(Run& run, int K) {
  const int n = run.config.sweep.scenario.dim;
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool pass, const json& detail) {
    checks.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
    all = all && pass;
    std::cout << (pass ? "ok   " : "FAIL ") << name << '\n';
  };

  const int Kd = std::min(K, brute_force_max_K);
  try {
    const auto rep = support_disjointness_check(spec_for(run.config, Kd));
    record("support-disjointness", true, {{"K", Kd}, {"samples", rep.samples}, {"overlaps", rep.overlaps}});
  } catch (const InvariantViolation& e) {
    record("support-disjointness", false, e.what());
  }

  std::mt19937_64 rng(run.config.sweep.seed);
  std::uniform_real_distribution<double> decade(-5.0, 5.0), angle(0.0, 2.0 * std::numbers::pi);
  double pu = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double r = std::pow(10.0, decade(rng));
    const Point xi = n == 1 ? make_point(r) : make_point(r * std::cos(angle(rng)), r * std::sin(angle(rng)));
    double sum = 0.0;
    for (int D = -40; D <= 40; ++D) sum += phi_lp(Point(std::ldexp(1.0, D) * xi));
    pu = std::max(pu, std::abs(sum - 1.0));
  }
  record("partition-of-unity", pu < 1e-12, {{"max_residual", pu}});

  const Grid grid(n, 8.0, n == 1 ? 1024 : 256);
  const auto f = SampledField::sample(grid, Variable::space, [](const Point& x) {
    return std::exp(-std::numbers::pi * x.squaredNorm()) * std::cos(3.0 * x(0));
  });
  const auto back = fourier_inverse(fourier_forward(f));
  const double rt = (back.values() - f.values()).abs().maxCoeff() / f.values().abs().maxCoeff();
  record("fourier-round-trip", rt < 1e-12, {{"relative_error", rt}});

  bool counts = true;
  for (int N = 1; N <= 14; ++N) counts = counts && index_set(N, 1).size() == (std::size_t(1) << (N - 1)) - 1;
  const auto two = index_set(1, 2).ks;
  counts = counts && two == std::vector<LatticePoint>{{1, 2}, {2, 1}, {2, 2}};
  record("index-set-counts", counts, "n = 1: 2^(N-1) - 1 for N <= 14; n = 2, N = 1: {(1,2), (2,1), (2,2)}");

  const Annulus annulus = find_annulus(psi_table(n));
  record("psi-annulus", annulus.min_abs >= annulus.threshold,
         {{"A", annulus.A}, {"min", annulus.min_abs}, {"threshold", annulus.threshold}});

  write_json(run, "verify.json", {{"config_hash", run.hash}, {"checks", checks}, {"pass", all}});
  return all;
}

void cmd_sweep(Run& run) {
  const Config& c = run.config;
  std::vector<SweepRecord> done;
  json wall = json::object();
  auto persist = [&] {
    json records = json::array();
    for (const auto& r : done) records.push_back(to_json(r));
    std::ofstream(run.out / "records.json") << json{{"config_hash", run.hash},
                                                    {"config", canonical_json(c)},
                                                    {"records", records}}
                                                   .dump(2)
                                            << '\n';
    std::ofstream csv(run.out / "sweep.csv");
    write_sweep_csv(csv, done, c.sweep.scenario, run.hash);
  };
  run.outputs = {"records.json", "sweep.csv"};
  run_sweep(c.sweep, [&](const SweepRecord& r) {
    done.push_back(r);
    wall[std::to_string(r.K)] = r.wall_seconds;
    run.details["wall_seconds_per_K"] = wall;
    persist();
    std::cout << "K = " << r.K << ": sup_D norm " << r.sup_norm << ", R(K) " << r.ratio(c.sweep.scenario.p) << " ("
              << r.wall_seconds << " s)" << std::endl;
  });
}

bool cmd_report(Run& run, const std::string& input) {
  const fs::path in_dir = input.empty() ? run.out : fs::path(input);
  std::ifstream f(in_dir / "records.json");
  if (!f) throw InvalidArgument("no records.json in " + in_dir.string() + "; run `sweep` first");
  json doc;
  try {
    f >> doc;
  } catch (const json::exception& e) {
    throw InvalidData(std::string("records.json is not valid JSON: ") + e.what());
  }
  // The report follows the configuration the records were produced with.
  if (doc.contains("config")) {
    Config recorded = config_from_json(doc.at("config"));
    recorded.output_dir = run.config.output_dir;
    recorded.threads = run.config.threads;
    run.config = recorded;
    run.hash = config_hash(recorded);
  }
  std::vector<SweepRecord> records;
  for (const auto& r : doc.at("records")) records.push_back(sweep_record_from_json(r));
  const auto& sc = run.config.sweep.scenario;
  const auto rep = contradiction_report(records, sc, run.config.report);
  json out = to_json(rep, sc);
  out["config_hash"] = run.hash;
  write_json(run, "report.json", out);

  const double p = sc.p;
  auto dat = [&](const std::string& name, const FitResult& fit, auto&& fn) {
    std::vector<std::pair<int, double>> pts;
    for (const auto& r : records) pts.emplace_back(r.K, fn(r));
    auto file = open_output(run, name + ".dat");
    write_gnuplot(file, name, pts, fit, run.hash);
  };
  dat("normalized_ratio", rep.normalized_ratio_fit, [p](const SweepRecord& r) { return r.normalized_ratio(p); });
  dat("sup_norm", rep.norm_fit, [](const SweepRecord& r) { return r.sup_norm; });
  dat("f_power", rep.f_power_fit, [p](const SweepRecord& r) { return std::pow(r.f_norm, p); });
  dat("mc_mean", rep.mc_fit, [](const SweepRecord& r) { return r.mc_mean; });

  for (const auto& c : rep.checks)
    std::cout << (c.pass ? "ok   " : "FAIL ") << c.name << ": " << c.value << " (threshold " << c.threshold << ")\n";
  std::cout << (rep.pass ? "PASS" : "FAIL") << ": normalized ratio slope " << rep.normalized_ratio_fit.slope
            << " vs target " << rep.target_slope << ", norm slope " << rep.norm_fit.slope << '\n';
  return rep.pass;
}

void emit_error(const std::string& kind, const std::string& code, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"code", code}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier multipliers on the critical line: counterexample laboratory", "critline"};
  app.set_version_flag("--version", CRITLINE_VERSION);
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  Overrides o;
  app.add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory");
  app.add_option("--threads", o.threads, "worker threads (0 = available parallelism)");
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--K-list", o.K_list, "comma-separated ascending K values")->delimiter(',');
  app.add_option("--M", o.M, "Monte Carlo samples per K");
  app.add_option("--n", o.n, "dimension (1 or 2)");
  app.add_option("--p", o.p, "Lebesgue exponent in (1, 2)");
  app.add_option("--s", o.s, "smoothness; defaults to the critical value n|1/p - 1/2|");
  app.add_option("--r", o.r, "norm integrability exponent");

  std::optional<int> K;
  auto* gen = app.add_subcommand("gen-multiplier", "sample m_t on a resolving grid (binary field + JSON sidecar)");
  gen->add_option("--K", K, "top scale (default: last of the K list)");

  std::vector<double> rs;
  auto* norm = app.add_subcommand("norm", "sup_D multiplier norm of m_t with the per-D table");
  norm->add_option("--K", K, "top scale");
  norm->add_option("--r-list", rs, "integrability exponents (default: scenario r)")->delimiter(',');

  std::string route = "closed-form";
  auto* apply = app.add_subcommand("apply", "T f on a space grid by the closed form or the spectral route");
  apply->add_option("--K", K, "top scale");
  apply->add_option("--route", route, "closed-form or spectral")->check(CLI::IsMember({"closed-form", "spectral"}));

  std::optional<int> samples;
  bool exhaustive = false;
  auto* kh = app.add_subcommand("khintchine", "Monte Carlo or exhaustive average of |T f|_p^p with shell table");
  kh->add_option("--K", K, "top scale");
  kh->add_option("--samples", samples, "Monte Carlo draws (default: M)");
  kh->add_flag("--exhaustive", exhaustive, "enumerate every sign pattern (small K only)");

  auto* verify = app.add_subcommand("verify", "structural checks: disjointness, partition of unity, round trips");
  verify->add_option("--K", K, "top scale for the disjointness scan (capped at 6)");

  auto* sweep = app.add_subcommand("sweep", "run the K sweep and write records.json and sweep.csv");

  std::string input;
  auto* report = app.add_subcommand("report", "fit the sweep and emit the PASS/FAIL report");
  report->add_option("--input", input, "directory holding records.json (default: --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << '\n';
    emit_error("usage", "usage", e.what());
    return usage;
  }

  std::optional<Run> run;
  try {
    Run r;
    r.config = resolve(o);
    set_thread_count(r.config.threads);
    r.hash = config_hash(r.config);
    r.out = r.config.output_dir;
    r.started = utc_now();
    fs::create_directories(r.out);
    run = std::move(r);
    const int top = K.value_or(top_K(run->config));
    if (K && *K < 1) throw InvalidArgument("--K must be >= 1");

    bool pass = true;
    if (gen->parsed()) {
      run->command = "gen-multiplier";
      cmd_gen_multiplier(*run, top);
    } else if (norm->parsed()) {
      run->command = "norm";
      cmd_norm(*run, top, rs);
    } else if (apply->parsed()) {
      run->command = "apply";
      cmd_apply(*run, top, route);
    } else if (kh->parsed()) {
      run->command = "khintchine";
      cmd_khintchine(*run, top, samples.value_or(run->config.sweep.samples), exhaustive);
    } else if (verify->parsed()) {
      run->command = "verify";
      pass = cmd_verify(*run, top);
    } else if (sweep->parsed()) {
      run->command = "sweep";
      cmd_sweep(*run);
    } else if (report->parsed()) {
      run->command = "report";
      cmd_report(*run, input);
    }
    write_manifest(*run, pass ? "ok" : "failed");
    if (!pass) {
      emit_error("invariant_violation", "verify-failed", "one or more structural checks failed");
      return invariant;
    }
    return ok;
  } catch (const Error& e) {
    static const char* kinds[] = {"usage", "invariant_violation", "resolution"};
    emit_error(kinds[static_cast<int>(e.kind())], e.code(), e.what());
    if (run && !run->command.empty()) write_manifest(*run, "error");
    switch (e.kind()) {
      case ErrorKind::usage:
        return usage;
      case ErrorKind::invariant_violation:
        return invariant;
      case ErrorKind::resolution:
        return resolution;
    }
    return usage;
  } catch (const std::exception& e) {
    emit_error("usage", "unexpected", e.what());
    return usage;
  }
}
