#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <tweezer/experiment.hpp>
#include <tweezer/optimizer.hpp>

#include "artifacts.hpp"
#include "config.hpp"

namespace tweezer::cli {

/// Command-line values that take precedence over the environment and the file.
struct Overrides {
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> pin_axes;
  bool allow_anticonfinement = false;
  bool nonnegative_pinning = false;
};

/// file (or embedded text) -> TWEEZER_* environment -> flags.
ConfigFile assemble_config(const ConfigFile& base, const Overrides& overrides);
ConfigFile assemble_config(const std::filesystem::path& file, const Overrides& overrides);

/// Canonical "[section]\nkey = value" text of the effective configuration.
std::string render_config(const ConfigFile& cfg);

struct CommandOutcome {
  Artifacts artifacts;
  bool converged = true;
};

/// Runs one of modes, couplings, feasibility, optimize, misalign, experiment.
CommandOutcome execute(const std::string& command, const ConfigFile& cfg);

struct OptimizeRun {
  OptimizationResult result;
  std::optional<MuScan> baseline;
};

OptimizeRun run_optimize(const RunConfig& rc);
/// Result files of an optimization; pure function of the run.
Artifacts optimize_artifacts(const RunConfig& rc, const OptimizeRun& run);

/// One canned run of a reproduce scenario.
struct ScenarioRun {
  std::string dir;
  std::string command;
  std::string config;
  std::string group;  // runs sharing a group are collected into <group>_sweep.csv
  double tag = 0.0;
};

const std::vector<std::string>& scenario_names();
std::vector<ScenarioRun> scenario_runs(const std::string& name);

/// Exit code contract: 0 success, 1 validation or usage error, 2 convergence failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tweezer::cli
