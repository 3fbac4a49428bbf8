#include "tweezer/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "tweezer/error.hpp"

namespace tweezer {

std::string_view to_string(SymmetryGroup group) {
  switch (group) {
    case SymmetryGroup::None: return "none";
    case SymmetryGroup::ReflectionZ: return "reflection_z";
    case SymmetryGroup::C6: return "c6";
    case SymmetryGroup::Ladder: return "ladder";
  }
  return "unknown";
}

SymmetryGroup parse_symmetry_group(std::string_view text) {
  if (text == "none") return SymmetryGroup::None;
  if (text == "reflection_z") return SymmetryGroup::ReflectionZ;
  if (text == "c6" || text == "C6") return SymmetryGroup::C6;
  if (text == "ladder" || text == "ladder_translation") return SymmetryGroup::Ladder;
  fail(ErrorCode::InvalidArgument, "unknown symmetry group '" + std::string(text) + "'");
}

Eigen::VectorXd SymmetryCells::expand(const Eigen::VectorXd& per_orbit) const {
  require(per_orbit.size() == orbit_count(), "symmetry: orbit vector has wrong size");
  Eigen::VectorXd out(static_cast<Eigen::Index>(orbit_of.size()));
  for (std::size_t i = 0; i < orbit_of.size(); ++i) out[Eigen::Index(i)] = per_orbit[orbit_of[i]];
  return out;
}

Eigen::VectorXd SymmetryCells::reduce(const Eigen::VectorXd& per_ion) const {
  require(per_ion.size() == Eigen::Index(orbit_of.size()), "symmetry: ion vector has wrong size");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(orbit_count());
  for (std::size_t i = 0; i < orbit_of.size(); ++i) out[orbit_of[i]] += per_ion[Eigen::Index(i)];
  return out;
}

Eigen::VectorXd SymmetryCells::average(const Eigen::VectorXd& per_ion) const {
  Eigen::VectorXd out = reduce(per_ion);
  for (int o = 0; o < orbit_count(); ++o) out[o] /= double(orbits[std::size_t(o)].size());
  return out;
}

SymmetryCells trivial_cells(int ion_count) {
  SymmetryCells c;
  for (int i = 0; i < ion_count; ++i) {
    c.orbits.push_back({i});
    c.orbit_of.push_back(i);
  }
  return c;
}

namespace {

// Axis with the smallest coordinate spread: the normal of a planar crystal.
int plane_normal(const Positions& p) {
  Eigen::Vector3d spread = p.cwiseAbs().colwise().maxCoeff().transpose();
  Eigen::Index a = 0;
  spread.minCoeff(&a);
  return static_cast<int>(a);
}

Eigen::Matrix3d generator(const Positions& p, SymmetryGroup group) {
  switch (group) {
    case SymmetryGroup::None: return Eigen::Matrix3d::Identity();
    case SymmetryGroup::ReflectionZ: return Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal();
    case SymmetryGroup::C6:
      return Eigen::AngleAxisd(std::numbers::pi / 3.0, Eigen::Vector3d::Unit(plane_normal(p))).toRotationMatrix();
    case SymmetryGroup::Ladder:
      return Eigen::AngleAxisd(std::numbers::pi, Eigen::Vector3d::Unit(plane_normal(p))).toRotationMatrix();
  }
  return Eigen::Matrix3d::Identity();
}

int find_root(std::vector<int>& parent, int i) {
  while (parent[std::size_t(i)] != i) i = parent[std::size_t(i)] = parent[std::size_t(parent[std::size_t(i)])];
  return i;
}

}  // namespace

SymmetryCells symmetry_orbits(const Positions& positions, SymmetryGroup group, double tolerance) {
  const int n = static_cast<int>(positions.rows());
  if (group == SymmetryGroup::None) return trivial_cells(n);
  require(tolerance > 0.0, "symmetry: tolerance must be positive");

  const Eigen::Matrix3d r = generator(positions, group);
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < n; ++i) {
    const Eigen::RowVector3d image = (r * positions.row(i).transpose()).transpose();
    int match = -1;
    for (int j = 0; j < n && match < 0; ++j)
      if ((positions.row(j) - image).norm() < tolerance) match = j;
    if (match < 0)
      fail(ErrorCode::InvalidArgument, "symmetry: ion " + std::to_string(i) + " has no image under " +
                                           std::string(to_string(group)));
    parent[std::size_t(find_root(parent, i))] = find_root(parent, match);
  }

  SymmetryCells c;
  c.orbit_of.assign(std::size_t(n), -1);
  for (int i = 0; i < n; ++i) {
    const int root = find_root(parent, i);
    if (c.orbit_of[std::size_t(root)] < 0) {
      c.orbit_of[std::size_t(root)] = c.orbit_count();
      c.orbits.emplace_back();
    }
    c.orbit_of[std::size_t(i)] = c.orbit_of[std::size_t(root)];
    c.orbits[std::size_t(c.orbit_of[std::size_t(i)])].push_back(i);
  }
  return c;
}

}  // namespace tweezer
