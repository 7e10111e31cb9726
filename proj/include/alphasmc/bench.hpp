#ifndef ALPHASMC_BENCH_HPP
#define ALPHASMC_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "alphasmc/filter.hpp"
#include "alphasmc/model.hpp"

namespace alphasmc {

/// Declarative experiment description, parsed from a JSON config.
struct ExperimentConfig {
  std::string experiment;
  std::string model_tag = "two-state";
  BuiltinParams model_params;
  std::uint64_t observation_seed = 0;
  std::vector<int> n_grid;
  std::vector<int> c_grid;
  std::vector<std::string> methods;
  std::vector<std::string> phis;
  int replicates = 100;
  int graphs = 20;           // mixing-sweep only
  int n_ref = 1000000;       // reference bootstrap size for "truth"
  std::uint64_t seed = 1;
  std::string out = "results";
  nlohmann::json raw;        // canonical source, embedded in the manifest
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Checks grid feasibility against the matrix generator preconditions.
/// Throws std::invalid_argument naming the offending (N, C, method) entry.
void validate_config(const ExperimentConfig& config);

/// Runs the experiment, writing <out>/<experiment>_raw.csv,
/// <out>/<experiment>_summary.csv and <out>/<experiment>_manifest.json.
/// Raw output is bitwise reproducible for a fixed config, independent of
/// the thread count. Files are written to a temp path and renamed.
void run_experiment(const ExperimentConfig& config, int threads = 1);

/// FNV-1a hash of the canonical (sorted-key) JSON dump, as hex.
std::string config_hash(const nlohmann::json& j);

/// Named test functions usable in configs: one, x, x2, state1, tail.
TestFunction test_function(const std::string& name);

/// Effective local-exchange row width for a requested connectivity C: C when
/// odd, C + 1 when even (window of floor(C/2) on each side plus self).
int local_exchange_width(int c);

/// CLI entry point (subcommands run, mixing, oracle, validate).
/// Returns 0 on success, 1 on config/usage errors, 2 on runtime errors.
int cli_main(int argc, char** argv);

}  // namespace alphasmc

#endif
