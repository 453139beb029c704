#pragma once

// Run configuration: a JSON document whose canonical form (sorted keys, no
// output paths or thread counts) is hashed to tag every output file.

#include <string>

#include <nlohmann/json.hpp>

#include "critline/experiment.hpp"

namespace critline {

struct Config {
  SweepConfig sweep;
  ReportOptions report;
  std::string output_dir = "out";
  unsigned threads = 0;  ///< 0 = available parallelism

  void validate() const { sweep.validate(); }
};

/// Canonical JSON; excludes output_dir and threads, which never change results.
nlohmann::json canonical_json(const Config& config);
Config config_from_json(const nlohmann::json& j);
Config load_config(const std::string& path);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const Config& config);
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace critline
