#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <tweezer/coupling.hpp>
#include <tweezer/experiment.hpp>
#include <tweezer/optimizer.hpp>
#include <tweezer/symmetry.hpp>
#include <tweezer/targets.hpp>

namespace tweezer::cli {

/// Raw "[section] key = value" text. Keys are stored as "section.key".
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& origin = "<config>");
  static ConfigFile load(const std::filesystem::path& path);

  /// Replaces values from environment variables PREFIX_SECTION_KEY (upper case).
  void apply_environment(const std::string& prefix = "TWEEZER");
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  const std::map<std::string, std::string>& values() const { return values_; }
  std::optional<std::string> get(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Every accepted "section.key", in documentation order.
const std::vector<std::string>& known_keys();

/// Typed run description. All frequencies are rad/s, lengths m.
struct RunConfig {
  SpeciesConstants species;
  TrapConfig trap;
  GeometryModel geometry = GeometryModel::Equilibrium;
  std::uint64_t seed = 1;
  int threads = 1;

  TargetSpec target;
  DriveConfig drive;
  bool has_mu = false;
  std::optional<AxisSet> mode_axes;

  AxisSet pin_axes{Axis::X};
  std::vector<double> pinning;  // signed frequencies per ion; empty when not given
  SymmetryGroup symmetry = SymmetryGroup::None;
  bool allow_anticonfinement = false;

  SearchSpace space;
  /// Points of the tweezer-free mu scan reported next to optimization results; 0 skips it.
  int baseline_points = 200;

  TweezerBeam beam{1.0, 1e-6, 1070e-9};
  AtomicLines lines;

  MisalignmentOptions misalign;
};

/// Converts and validates. Errors name the offending key.
RunConfig build_run_config(const ConfigFile& file);

}  // namespace tweezer::cli
