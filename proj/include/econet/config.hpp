#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "econet/experiments.hpp"

namespace econet {

// Everything a subcommand can be configured with. The run block is the
// reference configuration; sweep and scenario reuse it as their base.
struct ExperimentConfig {
  RunConfig run;
  std::vector<std::uint32_t> sweep_agents{500, 1000, 1500, 2000};
  std::vector<double> sweep_c_th{-0.72, -0.70, -0.68, -0.67};
  double scenario_c_th_final = -0.69;
  LSearch search;

  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Flat `key = value` lines; `#` starts a comment, blank lines are ignored.
//
//   L = 2000                 c_th = -0.70
//   run.total_steps          run.transient         run.seed
//   run.replicas             run.audit_every
//   dynamics.smoothing       dynamics.mode = preferential | uniform
//   measure.window           measure.sample_every
//   sweep.L_values = 500, 1000      sweep.c_th_values = -0.72, -0.70
//   scenario.c_th_final
//   search.L_min  search.L_max  search.rel_tol  search.scan_radius  search.replicas
//
// Unknown or repeated keys and malformed values throw ConfigError carrying
// the line number; the result is validated.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Every key with its effective value, in a fixed order. Reals are written in
// shortest round-trip form, so parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

// 64-bit FNV-1a of emit_config(config), as 16 lowercase hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace econet
