#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace tweezer {

using Positions = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

enum class Axis { X = 0, Y = 1, Z = 2 };

/// Subset of Cartesian axes, e.g. the axes a tweezer pins or a drive couples to.
class AxisSet {
 public:
  AxisSet() = default;
  AxisSet(std::initializer_list<Axis> axes) {
    for (Axis a : axes) flags_[static_cast<int>(a)] = true;
  }

  /// Parses strings like "x", "yz", "xyz".
  static AxisSet parse(std::string_view text);

  bool contains(int axis) const { return flags_.at(static_cast<std::size_t>(axis)); }
  bool contains(Axis axis) const { return contains(static_cast<int>(axis)); }
  int count() const { return int(flags_[0]) + int(flags_[1]) + int(flags_[2]); }
  bool empty() const { return count() == 0; }
  std::vector<int> indices() const;
  std::string str() const;

  bool operator==(const AxisSet&) const = default;

 private:
  std::array<bool, 3> flags_{false, false, false};
};

/// Local harmonic pinning: one symmetric curvature tensor (rad^2/s^2, already
/// divided by the ion mass) per ion, optionally displaced from its anchor.
///
/// The potential of ion i is (M/2) (r - c_i)^T K_i (r - c_i) with
/// c_i = anchor_i + offset_i. Without anchors the tweezers are centered on
/// whatever equilibrium they are applied to and do not exert forces.
struct TweezerPattern {
  std::vector<Eigen::Matrix3d> curvature;
  std::vector<Eigen::Vector3d> offsets;
  std::optional<Positions> anchors;

  static TweezerPattern none(int ion_count);

  /// Per-ion scalar curvature applied isotropically on `axes` (zero elsewhere).
  static TweezerPattern on_axes(std::span<const double> curvature_per_ion, AxisSet axes);

  int ion_count() const { return static_cast<int>(curvature.size()); }
  bool has_offsets() const;
  /// True when every tensor is zero outside the rows/columns listed in `axes`.
  bool restricted_to(AxisSet axes, double tol = 0.0) const;

  /// Per-ion center positions (anchor + offset); requires anchors.
  Positions centers() const;
};

/// Throws invalid-argument on asymmetric tensors, non-finite offsets or size mismatch.
void validate(const TweezerPattern& pattern);

}  // namespace tweezer
