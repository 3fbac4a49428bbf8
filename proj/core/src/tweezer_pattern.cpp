#include "tweezer/tweezer_pattern.hpp"

#include <cctype>
#include <cmath>

#include "tweezer/error.hpp"

namespace tweezer {

AxisSet AxisSet::parse(std::string_view text) {
  AxisSet set;
  for (char c : text) {
    switch (std::tolower(static_cast<unsigned char>(c))) {
      case 'x': set.flags_[0] = true; break;
      case 'y': set.flags_[1] = true; break;
      case 'z': set.flags_[2] = true; break;
      case ',': case ' ': break;
      default: fail(ErrorCode::InvalidArgument, "unknown axis '" + std::string(1, c) + "' in \"" + std::string(text) + "\"");
    }
  }
  if (set.empty()) fail(ErrorCode::InvalidArgument, "empty axis set");
  return set;
}

std::vector<int> AxisSet::indices() const {
  std::vector<int> out;
  for (int a = 0; a < 3; ++a)
    if (flags_[static_cast<std::size_t>(a)]) out.push_back(a);
  return out;
}

std::string AxisSet::str() const {
  std::string s;
  if (flags_[0]) s += 'x';
  if (flags_[1]) s += 'y';
  if (flags_[2]) s += 'z';
  return s;
}

TweezerPattern TweezerPattern::none(int ion_count) {
  require(ion_count >= 1, "tweezer pattern needs at least one ion");
  TweezerPattern p;
  p.curvature.assign(static_cast<std::size_t>(ion_count), Eigen::Matrix3d::Zero());
  p.offsets.assign(static_cast<std::size_t>(ion_count), Eigen::Vector3d::Zero());
  return p;
}

TweezerPattern TweezerPattern::on_axes(std::span<const double> curvature_per_ion, AxisSet axes) {
  TweezerPattern p = none(static_cast<int>(curvature_per_ion.size()));
  for (std::size_t i = 0; i < curvature_per_ion.size(); ++i)
    for (int a : axes.indices()) p.curvature[i](a, a) = curvature_per_ion[i];
  return p;
}

bool TweezerPattern::has_offsets() const {
  for (const auto& o : offsets)
    if (!o.isZero(0.0)) return true;
  return false;
}

bool TweezerPattern::restricted_to(AxisSet axes, double tol) const {
  for (const auto& k : curvature)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if ((!axes.contains(a) || !axes.contains(b)) && std::abs(k(a, b)) > tol) return false;
  return true;
}

Positions TweezerPattern::centers() const {
  require(anchors.has_value(), "tweezer centers requested without anchors");
  Positions c = *anchors;
  for (int i = 0; i < c.rows(); ++i) c.row(i) += offsets[static_cast<std::size_t>(i)].transpose();
  return c;
}

void validate(const TweezerPattern& pattern) {
  require(pattern.curvature.size() == pattern.offsets.size(),
          "tweezer pattern: curvature and offset counts differ");
  for (const auto& k : pattern.curvature) {
    require(k.allFinite(), "tweezer pattern: non-finite curvature");
    const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
    require((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
            "tweezer pattern: curvature tensor not symmetric");
  }
  for (const auto& o : pattern.offsets) require(o.allFinite(), "tweezer pattern: non-finite offset");
  if (pattern.anchors)
    require(pattern.anchors->rows() == static_cast<Eigen::Index>(pattern.curvature.size()),
            "tweezer pattern: anchor count differs from ion count");
}

}  // namespace tweezer
