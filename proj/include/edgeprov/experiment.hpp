#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgeprov/sim.hpp"

namespace edgeprov {

/// One swept parameter: a SimConfig field name and the values it takes.
struct SweepAxis {
  std::string name;
  std::vector<nlohmann::json> values;
};

/// A base configuration plus sweep axes and seeds; the cross product of axis
/// values times seeds is the set of runs.
struct ExperimentSpec {
  SimConfig base;
  std::vector<SweepAxis> axes;
  std::vector<std::uint64_t> seeds = {1};
  std::string output_dir = "edgeprov_out";
  std::size_t run_cap = 10000;

  std::size_t total_runs() const;
  void validate() const;
};

/// Parses the JSON configuration (empty input means all defaults with the
/// `table2` preset). Unknown keys are rejected with the nearest valid name;
/// type mismatches report the offending path.
ExperimentSpec parse_config(const std::string& text);

/// Reads and parses the configuration file at `path`.
ExperimentSpec load_config(const std::string& path);

/// Applies a single textual override (CLI flags, C API), e.g. ("V", "50"),
/// ("policy", "greedy-match"), ("seed", "7"), ("output_dir", "out").
void apply_override(ExperimentSpec& spec, const std::string& key, const std::string& value);

/// The outcome of one run of the sweep.
struct RunResult {
  std::size_t index = 0;
  std::vector<std::pair<std::string, std::string>> swept;  // axis name -> value
  std::uint64_t seed = 0;
  Metrics metrics;
};

/// Expands the sweep into concrete (config, swept-values, seed) triples in
/// deterministic order.
std::vector<std::pair<SimConfig, RunResult>> expand_runs(const ExperimentSpec& spec);

/// Executes all runs (in parallel across runs, capped by EDGEPROV_THREADS),
/// writes one per-slot CSV per run plus summary.csv, and prints a table of
/// the summary rows when `print_table` is set. Returns a process exit code:
/// zero on success. Optionally hands back the run results.
int run_experiments(const ExperimentSpec& spec, bool print_table = true,
                    std::vector<RunResult>* results_out = nullptr);

/// Locale-independent shortest formatting used in all CSV output.
std::string format_number(double value);

}  // namespace edgeprov
