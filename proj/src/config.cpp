#include "critline/config.hpp"

#include <cstdio>
#include <fstream>

namespace critline {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

nlohmann::json canonical_json(const Config& config) {
  nlohmann::json j = to_json(config.sweep);
  const auto& r = config.report;
  j["report"] = {{"fit_K_min", r.fit_K_min},
                 {"slope_tolerance", r.slope_tolerance},
                 {"flat_residual", r.flat_residual},
                 {"proxy_ratio_limit", r.proxy_ratio_limit},
                 {"mc_slope_tolerance", r.mc_slope_tolerance},
                 {"exact_residual", r.exact_residual}};
  return j;
}

Config config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("configuration must be a JSON object");
  Config c;
  c.sweep = sweep_config_from_json(j);
  try {
    if (j.contains("report")) {
      const auto& r = j.at("report");
      c.report.fit_K_min = r.value("fit_K_min", c.report.fit_K_min);
      c.report.slope_tolerance = r.value("slope_tolerance", c.report.slope_tolerance);
      c.report.flat_residual = r.value("flat_residual", c.report.flat_residual);
      c.report.proxy_ratio_limit = r.value("proxy_ratio_limit", c.report.proxy_ratio_limit);
      c.report.mc_slope_tolerance = r.value("mc_slope_tolerance", c.report.mc_slope_tolerance);
      c.report.exact_residual = r.value("exact_residual", c.report.exact_residual);
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad configuration: ") + e.what());
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open configuration " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("configuration " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const Config& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_json(config).dump())));
  return buf;
}

}  // namespace critline
