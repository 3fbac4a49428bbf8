#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include <tweezer/targets.hpp>

#include "helpers.hpp"

using namespace tweezer;

namespace {

void check_shape(const CouplingMatrix& j) {
  CHECK(j == j.transpose());
  CHECK(j.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(j.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
}

}  // namespace

TEST_CASE("nearest-neighbor chain") {
  TargetSpec spec;
  const CouplingMatrix j = build_target(spec, make_lattice(LatticeKind::Chain, 4, 1.0));
  check_shape(j);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK(j(a, b) == (std::abs(a - b) == 1 ? 1.0 : 0.0));
}

TEST_CASE("nearest neighbors of a non-uniform chain keep its end bonds") {
  Positions p = Positions::Zero(6, 3);
  const double z[] = {-4.0, -2.2, -0.7, 0.7, 2.2, 4.0};
  for (int i = 0; i < 6; ++i) p(i, 2) = z[i];
  CHECK(nearest_neighbor_pairs(p).size() == 5);
}

TEST_CASE("power law") {
  TargetSpec spec;
  spec.kind = TargetKind::PowerLaw;
  spec.xi = 3;
  const CouplingMatrix j = build_target(spec, make_lattice(LatticeKind::Chain, 5, 2.0));
  check_shape(j);
  CHECK(j(0, 2) / j(0, 1) == doctest::Approx(1.0 / 8.0));
  spec.xi = 0;
  const CouplingMatrix flat = build_target(spec, make_lattice(LatticeKind::Chain, 5, 2.0));
  CHECK((flat + Eigen::MatrixXd::Identity(5, 5)).minCoeff() == doctest::Approx(1.0));
  spec.sign = -1;
  spec.xi = 1;
  spec.distance = DistanceMode::Index;
  CHECK(build_target(spec, make_lattice(LatticeKind::Chain, 5, 2.0))(0, 3) == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("triangular antiferromagnet has 42 bonds and C6 symmetry") {
  TargetSpec spec;
  spec.kind = TargetKind::TriangularAF;
  const Positions p = make_lattice(LatticeKind::Triangular, 19, 1.0);
  const CouplingMatrix j = build_target(spec, p);
  check_shape(j);
  int edges = 0;
  for (int a = 0; a < 19; ++a)
    for (int b = a + 1; b < 19; ++b) edges += j(a, b) != 0.0;
  CHECK(edges == 42);

  const Eigen::Matrix3d rot = Eigen::AngleAxisd(M_PI / 3, Eigen::Vector3d::UnitX()).toRotationMatrix();
  std::vector<int> perm(19);
  for (int a = 0; a < 19; ++a)
    for (int b = 0; b < 19; ++b)
      if ((rot * p.row(a).transpose() - p.row(b).transpose()).norm() < 1e-9) perm[a] = b;
  for (int a = 0; a < 19; ++a)
    for (int b = 0; b < 19; ++b) CHECK(j(perm[a], perm[b]) == j(a, b));

  CHECK_THROWS_AS(build_target(spec, make_lattice(LatticeKind::Chain, 6, 1.0)), Error);
}

TEST_CASE("spin ladder legs and rungs") {
  // Two rows of four ions along z separated by 0.8 in y.
  Positions p(8, 3);
  for (int i = 0; i < 4; ++i) {
    p.row(i) << 0, 0.4, i - 1.5;
    p.row(4 + i) << 0, -0.4, i - 1.5;
  }
  TargetSpec spec;
  spec.kind = TargetKind::SpinLadder;
  const CouplingMatrix j = build_target(spec, p);
  check_shape(j);
  CHECK(j(0, 1) == 1.0);
  CHECK(j(0, 4) == -1.0);
  CHECK(j(0, 5) == 0.0);
  CHECK_THROWS_AS(build_target(spec, make_lattice(LatticeKind::Chain, 4, 1.0)), Error);
}

TEST_CASE("explicit targets and file loaders") {
  const std::string mpath = "tweezer_test_matrix.txt";
  {
    std::ofstream out(mpath);
    out << "# comment\n0 2 0\n2 0 -1\n0 -1 0\n";
  }
  const CouplingMatrix m = load_matrix_file(mpath);
  CHECK(m(0, 1) == 2);
  TargetSpec spec;
  spec.kind = TargetKind::Explicit;
  spec.matrix = m;
  const CouplingMatrix j = build_target(spec, make_lattice(LatticeKind::Chain, 3, 1.0));
  CHECK(j(0, 1) == 1.0);
  CHECK(j(1, 2) == -0.5);

  const std::string epath = "tweezer_test_edges.txt";
  {
    std::ofstream out(epath);
    out << "1 2 2\n2 3 -1\n";
  }
  CHECK(load_edge_list(epath) == m);
  CHECK(load_edge_list(epath, 5).rows() == 5);
  {
    std::ofstream out(epath);
    out << "1 1 2\n";
  }
  CHECK_THROWS_AS(load_edge_list(epath), Error);
  std::remove(mpath.c_str());
  std::remove(epath.c_str());

  spec.matrix(0, 1) = 3;
  CHECK_THROWS_AS(build_target(spec, make_lattice(LatticeKind::Chain, 3, 1.0)), Error);
}
