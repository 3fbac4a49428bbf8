#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tweezer/coupling.hpp"
#include "tweezer/sensitivity.hpp"

namespace tweezer {

enum class TargetKind { NearestNeighbor, PowerLaw, SpinLadder, TriangularAF, Explicit };
enum class DistanceMode { Actual, Index };

std::string_view to_string(TargetKind kind);
TargetKind parse_target_kind(std::string_view text);

/// Sign convention everywhere: +1 antiferromagnetic, -1 ferromagnetic.
struct TargetSpec {
  TargetKind kind = TargetKind::NearestNeighbor;
  int sign = +1;
  double xi = 1.0;
  int rung_sign = -1;
  int leg_sign = +1;
  DistanceMode distance = DistanceMode::Actual;
  /// Pair (j, k) is a neighbor when d_jk < factor * min(nearest distance of j, of k).
  double neighbor_factor = 1.3;
  CouplingMatrix matrix;  // explicit targets only
};

void validate(const TargetSpec& spec);

/// Nearest-neighbor pairs (j < k) under the local distance rule.
std::vector<IonPair> nearest_neighbor_pairs(const Positions& positions, double factor = 1.3);

/// Target couplings normalized to max |J_T| = 1.
CouplingMatrix build_target(const TargetSpec& spec, const Positions& positions);

/// Whitespace-separated rows; blank lines and lines starting with '#' are skipped.
CouplingMatrix load_matrix_file(const std::filesystem::path& path);
/// "i j value" per line with 1-based indices; ion_count <= 0 infers it from the largest index.
CouplingMatrix load_edge_list(const std::filesystem::path& path, int ion_count = 0);

}  // namespace tweezer
