#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tweezer/tweezer_pattern.hpp"

namespace tweezer {

/// Point groups used to tie pinning values. `Ladder` is the in-plane C2
/// rotation that exchanges the two rows of a zigzag ladder end to end.
enum class SymmetryGroup { None, ReflectionZ, C6, Ladder };

std::string_view to_string(SymmetryGroup group);
SymmetryGroup parse_symmetry_group(std::string_view text);

struct SymmetryCells {
  std::vector<std::vector<int>> orbits;  // sorted members, ordered by smallest member
  std::vector<int> orbit_of;             // ion -> orbit index

  int orbit_count() const { return static_cast<int>(orbits.size()); }
  int representative(int orbit) const { return orbits.at(static_cast<std::size_t>(orbit)).front(); }

  /// Per-ion values from one value per orbit.
  Eigen::VectorXd expand(const Eigen::VectorXd& per_orbit) const;
  /// Chain rule back to orbit parameters: sums member entries.
  Eigen::VectorXd reduce(const Eigen::VectorXd& per_ion) const;
  /// Orbit averages of per-ion values.
  Eigen::VectorXd average(const Eigen::VectorXd& per_ion) const;
};

SymmetryCells trivial_cells(int ion_count);

/// Orbits of the group acting on positions about the origin; positions must
/// map onto each other within `tolerance` (m). Throws invalid-argument otherwise.
SymmetryCells symmetry_orbits(const Positions& positions, SymmetryGroup group, double tolerance);

}  // namespace tweezer
