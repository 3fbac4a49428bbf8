#include <doctest.h>

#include <cmath>

#include <tweezer/crystal.hpp>
#include <tweezer/rng.hpp>

#include "helpers.hpp"

using namespace tweezer;
using testing::rel;
using testing::trap_mhz;

TEST_CASE("equidistant spacing scaling and regression value") {
  const auto yb = ytterbium171();
  const double w = mhz_to_angular(0.1);
  CHECK(rel(equidistant_spacing(2 * w, 12, yb) / equidistant_spacing(w, 12, yb), std::pow(2.0, -2.0 / 3.0)) < 1e-12);
  CHECK(rel(equidistant_spacing(w, 6, yb) / equidistant_spacing(w, 12, yb), std::pow(2.0, 0.56)) < 1e-12);
  CHECK(rel(equidistant_spacing(w, 12, yb), 6.327441886371415e-06) < 1e-12);
  CHECK_THROWS_AS(equidistant_spacing(0.0, 12, yb), Error);
  CHECK_THROWS_AS(equidistant_spacing(w, 1, yb), Error);
}

TEST_CASE("single ion at the origin has zero energy and force") {
  const auto trap = trap_mhz(1, 1, 1, 1);
  const auto pe = potential_and_gradient(Positions::Zero(1, 3), trap, ytterbium171());
  CHECK(pe.energy == 0.0);
  CHECK(pe.gradient.norm() == 0.0);
}

TEST_CASE("analytic gradient and Hessian match finite differences") {
  const auto yb = ytterbium171();
  const auto trap = trap_mhz(1.3, 0.9, 0.4, 5);
  const double ell = coulomb_length(trap.mean_frequency(), yb);
  CounterRng rng(7, 0);
  Positions p(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int a = 0; a < 3; ++a) p(i, a) = rng.uniform(-2, 2) * ell;

  std::vector<double> k(5);
  for (auto& v : k) v = rng.uniform(0.0, 1.0) * trap.omega[0] * trap.omega[0];
  TweezerPattern tw = TweezerPattern::on_axes(k, AxisSet{Axis::X, Axis::Y});
  tw.anchors = p;
  for (int i = 0; i < 5; ++i) tw.offsets[i] = Eigen::Vector3d(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), 0) * ell;

  const TweezerPattern* const cases[] = {nullptr, &tw};
  for (const TweezerPattern* t : cases) {
    const auto pe = potential_and_gradient(p, trap, yb, t);
    const Eigen::MatrixXd h = potential_hessian(p, trap, yb, t);
    const double step = 1e-5 * ell;
    for (int i = 0; i < 5; ++i)
      for (int a = 0; a < 3; ++a) {
        Positions pp = p, pm = p;
        pp(i, a) += step;
        pm(i, a) -= step;
        const double fd = (potential_and_gradient(pp, trap, yb, t).energy -
                           potential_and_gradient(pm, trap, yb, t).energy) / (2 * step);
        CHECK(std::abs(fd - pe.gradient(i, a)) < 1e-7 * pe.gradient.cwiseAbs().maxCoeff());
        const Positions gdiff = (potential_and_gradient(pp, trap, yb, t).gradient -
                                 potential_and_gradient(pm, trap, yb, t).gradient) / (2 * step);
        for (int j = 0; j < 5; ++j)
          for (int b = 0; b < 3; ++b)
            CHECK(std::abs(gdiff(j, b) - h(3 * j + b, 3 * i + a)) < 1e-6 * h.cwiseAbs().maxCoeff());
      }
  }
}

TEST_CASE("coincident ions are rejected") {
  Positions p = Positions::Zero(2, 3);
  CHECK_THROWS_WITH_AS(potential_and_gradient(p, trap_mhz(1, 1, 1, 2), ytterbium171()),
                       doctest::Contains("coincide"), Error);
}

TEST_CASE("two- and three-ion axial equilibria") {
  const auto yb = ytterbium171();
  for (int n : {2, 3}) {
    const auto trap = trap_mhz(3, 3, 0.5, n);
    const double ell = coulomb_length(trap.omega[2], yb);
    const Positions guess = make_lattice(LatticeKind::Chain, n, ell);
    const IonCrystal c = solve_equilibrium(trap, yb, guess);
    CHECK(c.dimensionality == Dimensionality::Chain);
    const double expected = n == 2 ? std::pow(0.5, 2.0 / 3.0) : std::cbrt(5.0 / 4.0);
    CHECK(rel(c.positions(n - 1, 2), expected * ell) < 1e-9);
    CHECK(rel(-c.positions(0, 2), expected * ell) < 1e-9);
    if (n == 3) CHECK(std::abs(c.positions(1, 2)) < 1e-9 * ell);
  }
}

TEST_CASE("twelve-ion chain is linear and mirror symmetric") {
  const auto yb = ytterbium171();
  const auto trap = trap_mhz(2, 0.6, 0.07, 12);
  const IonCrystal c = solve_ground_state(trap, yb);
  const double ell = c.length_scale();
  CHECK(c.dimensionality == Dimensionality::Chain);
  CHECK(c.positions.leftCols(2).cwiseAbs().maxCoeff() < 1e-9 * ell);
  std::vector<double> z(12);
  for (int i = 0; i < 12; ++i) z[i] = c.positions(i, 2);
  std::sort(z.begin(), z.end());
  for (int i = 0; i < 12; ++i) CHECK(std::abs(z[i] + z[11 - i]) < 1e-8 * ell);
  const auto pe = potential_and_gradient(c.positions, trap, yb);
  const double wbar = trap.mean_frequency();
  CHECK(pe.gradient.norm() / (yb.mass * wbar * wbar * ell) < 1e-10);
}

TEST_CASE("centered tweezers leave the equilibrium unchanged") {
  const auto yb = ytterbium171();
  const auto trap = trap_mhz(2, 0.6, 0.1, 6);
  const IonCrystal bare = solve_ground_state(trap, yb);
  std::vector<double> k(6, std::pow(mhz_to_angular(0.3), 2));
  TweezerPattern tw = TweezerPattern::on_axes(k, AxisSet::parse("xyz"));
  tw.anchors = bare.positions;
  const IonCrystal pinned = solve_equilibrium(trap, yb, bare.positions, &tw);
  CHECK((pinned.positions - bare.positions).cwiseAbs().maxCoeff() == 0.0);

  TweezerPattern centered = TweezerPattern::on_axes(k, AxisSet::parse("xyz"));
  const Positions nudged = bare.positions * 1.01;
  const IonCrystal a = solve_equilibrium(trap, yb, nudged, &centered);
  const IonCrystal b = solve_equilibrium(trap, yb, nudged);
  CHECK((a.positions - b.positions).cwiseAbs().maxCoeff() < 1e-10 * bare.length_scale());
}

TEST_CASE("offset tweezers displace the ions") {
  const auto yb = ytterbium171();
  const auto trap = trap_mhz(2, 0.6, 0.1, 4);
  const IonCrystal bare = solve_ground_state(trap, yb);
  std::vector<double> k(4, std::pow(mhz_to_angular(0.3), 2));
  TweezerPattern tw = TweezerPattern::on_axes(k, AxisSet{Axis::Y});
  tw.anchors = bare.positions;
  tw.offsets[1] = Eigen::Vector3d(0, 10e-9, 0);
  const IonCrystal shifted = solve_equilibrium(trap, yb, bare.positions, &tw);
  CHECK(shifted.positions(1, 1) > 0.0);
  CHECK(shifted.positions(1, 1) < 10e-9);
}

TEST_CASE("planar ground states and the non-planar error") {
  const auto yb = ytterbium171();
  const IonCrystal tri = solve_ground_state(trap_mhz(2.4, 0.16, 0.16, 7), yb);
  CHECK(tri.dimensionality == Dimensionality::Planar);
  CHECK(tri.positions.col(0).cwiseAbs().maxCoeff() < 1e-6 * tri.length_scale());

  const auto iso = trap_mhz(1, 1, 1, 4);
  const double ell = coulomb_length(iso.omega[0], yb);
  Positions tet(4, 3);
  tet << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
  CHECK_THROWS_AS(solve_equilibrium(iso, yb, tet * (0.5 * ell)), Error);
  try {
    solve_equilibrium(iso, yb, tet * (0.5 * ell));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPlanar);
  }
}

TEST_CASE("iteration budget exhaustion reports the residual") {
  const auto yb = ytterbium171();
  const auto trap = trap_mhz(3, 3, 0.5, 3);
  const double ell = coulomb_length(trap.omega[2], yb);
  EquilibriumOptions opts;
  opts.max_iterations = 0;
  try {
    solve_equilibrium(trap, yb, make_lattice(LatticeKind::Chain, 3, 0.5 * ell), nullptr, opts);
    FAIL("expected convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.code() == ErrorCode::Convergence);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("lattice generators") {
  const Positions chain = make_lattice(LatticeKind::Chain, 3, 2.0);
  CHECK(chain(0, 2) == -2.0);
  CHECK(chain(1, 2) == 0.0);
  CHECK(chain(2, 2) == 2.0);

  const Positions hex7 = make_lattice(LatticeKind::Triangular, 7, 1.5);
  CHECK(hex7.row(0).norm() == 0.0);
  for (int i = 1; i < 7; ++i) CHECK(rel(hex7.row(i).norm(), 1.5) < 1e-12);

  const Positions hex19 = make_lattice(LatticeKind::Triangular, 19, 1.0);
  int edges = 0;
  for (int i = 0; i < 19; ++i)
    for (int j = i + 1; j < 19; ++j)
      if (std::abs((hex19.row(i) - hex19.row(j)).norm() - 1.0) < 1e-9) ++edges;
  CHECK(edges == 42);
  CHECK(hex19.col(0).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(make_lattice(LatticeKind::Triangular, 8, 1.0), Error);
  CHECK(hexagonal_count(2) == 19);
}

TEST_CASE("invalid trap and species inputs") {
  CHECK_THROWS_AS(validate(trap_mhz(0, 1, 1, 2)), Error);
  CHECK_THROWS_AS(validate(trap_mhz(1, 1, 1, 0)), Error);
  SpeciesConstants bad = ytterbium171();
  bad.mass = -1;
  CHECK_THROWS_AS(validate(bad), Error);
}
