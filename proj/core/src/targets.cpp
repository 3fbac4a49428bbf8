#include "tweezer/targets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace tweezer {

std::string_view to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::NearestNeighbor: return "nearest_neighbor";
    case TargetKind::PowerLaw: return "power_law";
    case TargetKind::SpinLadder: return "spin_ladder";
    case TargetKind::TriangularAF: return "triangular_af";
    case TargetKind::Explicit: return "explicit";
  }
  return "unknown";
}

TargetKind parse_target_kind(std::string_view text) {
  for (TargetKind k : {TargetKind::NearestNeighbor, TargetKind::PowerLaw, TargetKind::SpinLadder,
                       TargetKind::TriangularAF, TargetKind::Explicit})
    if (to_string(k) == text) return k;
  fail(ErrorCode::InvalidArgument, "unknown target kind '" + std::string(text) + "'");
}

void validate(const TargetSpec& spec) {
  auto unit = [](int s) { return s == 1 || s == -1; };
  require(unit(spec.sign) && unit(spec.rung_sign) && unit(spec.leg_sign), "target: signs must be +1 or -1");
  require(spec.xi >= 0.0 && std::isfinite(spec.xi), "target: xi must be non-negative");
  require(spec.neighbor_factor > 1.0, "target: neighbor factor must exceed 1");
  if (spec.kind == TargetKind::Explicit) {
    const auto& m = spec.matrix;
    require(m.rows() == m.cols() && m.rows() > 0, "target: explicit matrix must be square");
    require(m.allFinite(), "target: explicit matrix must be finite");
    require((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0, "target: explicit matrix must be symmetric");
    require(m.diagonal().cwiseAbs().maxCoeff() == 0.0, "target: explicit matrix must have a zero diagonal");
  }
}

std::vector<IonPair> nearest_neighbor_pairs(const Positions& positions, double factor) {
  const int n = static_cast<int>(positions.rows());
  Eigen::VectorXd nearest = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (j != k) nearest[j] = std::min(nearest[j], (positions.row(j) - positions.row(k)).norm());
  std::vector<IonPair> out;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      if ((positions.row(j) - positions.row(k)).norm() < factor * std::min(nearest[j], nearest[k]))
        out.emplace_back(j, k);
  return out;
}

namespace {

// Principal in-plane directions of the ion cloud: long axis first.
std::pair<Eigen::Vector3d, Eigen::Vector3d> principal_axes(const Positions& p) {
  const Eigen::RowVector3d mean = p.colwise().mean();
  const Eigen::MatrixXd centered = p.rowwise() - mean;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(centered.transpose() * centered);
  return {eig.eigenvectors().col(2), eig.eigenvectors().col(1)};
}

}  // namespace

CouplingMatrix build_target(const TargetSpec& spec, const Positions& positions) {
  validate(spec);
  const int n = static_cast<int>(positions.rows());
  if (spec.kind == TargetKind::Explicit) {
    require(spec.matrix.rows() == n, "target: explicit matrix size differs from ion count");
    const double peak = spec.matrix.cwiseAbs().maxCoeff();
    if (!(peak > 0.0)) fail(ErrorCode::UndefinedNormalization, "target: explicit matrix is zero");
    return spec.matrix / peak;
  }
  require(n >= 2, "target: need at least two ions");
  CouplingMatrix j = CouplingMatrix::Zero(n, n);

  switch (spec.kind) {
    case TargetKind::NearestNeighbor:
      for (auto [a, b] : nearest_neighbor_pairs(positions, spec.neighbor_factor)) j(a, b) = j(b, a) = spec.sign;
      break;
    case TargetKind::PowerLaw: {
      const double dmin = min_pair_distance(positions);
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
          const double r = spec.distance == DistanceMode::Actual ? (positions.row(a) - positions.row(b)).norm() / dmin
                                                                 : double(b - a);
          j(a, b) = j(b, a) = spec.sign * std::pow(r, -spec.xi);
        }
      break;
    }
    case TargetKind::SpinLadder: {
      const auto [along, across] = principal_axes(positions);
      const Eigen::RowVector3d mean = positions.colwise().mean();
      const Eigen::VectorXd spread = (positions.rowwise() - mean) * across;
      require(spread.cwiseAbs().maxCoeff() > 1e-6 * min_pair_distance(positions),
              "target: spin ladder needs a two-row crystal");
      int legs = 0, rungs = 0;
      for (auto [a, b] : nearest_neighbor_pairs(positions, spec.neighbor_factor)) {
        const Eigen::Vector3d d = (positions.row(b) - positions.row(a)).transpose();
        const bool leg = std::abs(d.dot(along)) > std::abs(d.dot(across));
        j(a, b) = j(b, a) = leg ? spec.leg_sign : spec.rung_sign;
        (leg ? legs : rungs)++;
      }
      require(legs > 0 && rungs > 0, "target: spin ladder geometry has no legs or no rungs");
      break;
    }
    case TargetKind::TriangularAF: {
      int shells = 0;
      while (hexagonal_count(shells) < n) ++shells;
      require(hexagonal_count(shells) == n, "target: triangular lattice needs a centered hexagonal ion count");
      for (auto [a, b] : nearest_neighbor_pairs(positions, spec.neighbor_factor)) j(a, b) = j(b, a) = 1.0;
      break;
    }
    case TargetKind::Explicit:
      break;
  }
  const double peak = j.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) fail(ErrorCode::UndefinedNormalization, "target: no couplings selected");
  return j / peak;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open " + path.string());
  return in;
}

bool skip_line(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

CouplingMatrix load_matrix_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        fail(ErrorCode::InvalidArgument, path.string() + ": bad number '" + tok + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  require(n > 0, path.string() + ": empty matrix");
  CouplingMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    require(static_cast<Eigen::Index>(rows[std::size_t(r)].size()) == n, path.string() + ": matrix is not square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rows[std::size_t(r)][std::size_t(c)];
  }
  return m;
}

CouplingMatrix load_edge_list(const std::filesystem::path& path, int ion_count) {
  auto in = open_input(path);
  struct Edge { int i, j; double v; };
  std::vector<Edge> edges;
  std::string line;
  int largest = 0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    std::istringstream ss(line);
    Edge e{};
    std::string rest;
    if (!(ss >> e.i >> e.j >> e.v) || (ss >> rest))
      fail(ErrorCode::InvalidArgument, path.string() + ":" + std::to_string(lineno) + ": expected 'i j value'");
    require(e.i >= 1 && e.j >= 1 && e.i != e.j,
            path.string() + ":" + std::to_string(lineno) + ": indices must be distinct and 1-based");
    largest = std::max({largest, e.i, e.j});
    edges.push_back(e);
  }
  const int n = ion_count > 0 ? ion_count : largest;
  require(largest <= n, path.string() + ": index exceeds ion count");
  CouplingMatrix m = CouplingMatrix::Zero(n, n);
  for (const auto& e : edges) m(e.i - 1, e.j - 1) = m(e.j - 1, e.i - 1) = e.v;
  return m;
}

}  // namespace tweezer
