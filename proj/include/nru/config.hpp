#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nru/pipeline.hpp"

namespace nru {

struct SweepConfig {
  std::vector<double> densities{2e-5, 4e-5, 6e-5, 8e-5, 1e-4, 1.2e-4, 1.4e-4, 1.6e-4, 1.8e-4, 2e-4};
  std::vector<double> min_rates{50e6, 75e6, 100e6};  // empty: the scenario's minimum rate only
  std::vector<unsigned> cw_nru{16};                   // empty: the scenario's NR-U window only
  double target_q_s = 0.01;
  bool plot_script = true;
};

struct ValidateConfig {
  std::uint64_t seed = 1;
  std::uint64_t resq_arrivals = 2'000'000;
  std::uint64_t lbt_slots = 1'000'000;
  std::uint64_t mc_samples = 1'000'000;
  unsigned batches = 20;
  double confidence = 0.95;
  double sigmas = 3.0;
};

struct RunConfig {
  Scenario scenario;
  std::string licensed_mcs_path;    // resolved path of the loaded table
  std::string unlicensed_mcs_path;
  SweepConfig sweep;
  ValidateConfig validate;
};

// Built-in defaults with the shipped MCS tables.
RunConfig default_run_config();

// Parses an INI document (sections, key = value, '#' or ';' comments).
// Unknown sections or keys raise a config error listing every offender.
// Relative MCS table paths resolve against base_dir.
RunConfig parse_run_config(std::istream& in, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

// Writes every key with its current value; parsing the output yields the same configuration.
void dump_run_config(const RunConfig& cfg, std::ostream& out);

}  // namespace nru
