#include <doctest.h>

#include <cmath>

#include <tweezer/optimizer.hpp>

#include "helpers.hpp"

using namespace tweezer;
using testing::trap_mhz;

namespace {

SearchSpace small_space() {
  SearchSpace s;
  s.omega_z_min = s.omega_z_max = mhz_to_angular(0.2);
  s.mu_min = s.mu_max = mhz_to_angular(2.3);
  s.pin_min = 0.0;
  s.pin_max = mhz_to_angular(0.5);
  s.grid_omega_z = 1;
  s.grid_mu = 1;
  s.restarts = 3;
  return s;
}

PinningProblem chain_problem(int n, SymmetryCells cells) {
  const IonCrystal c = stage_crystal(trap_mhz(2, 1.2, 0.2, n), mhz_to_angular(0.2), ytterbium171(),
                                     GeometryModel::Equidistant);
  return PinningProblem(c, build_target(TargetSpec{}, c.positions), AxisSet{Axis::X}, Eigen::Vector3d::UnitX(),
                        std::pow(mhz_to_angular(0.5), 2), khz_to_angular(1), std::move(cells));
}

}  // namespace

TEST_CASE("grid helper") {
  CHECK(linear_grid(1, 3, 3) == std::vector<double>{1, 2, 3});
  CHECK(linear_grid(2, 2, 5) == std::vector<double>{2});
  SearchSpace bad = small_space();
  bad.mu_min = bad.mu_max + 1;
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("epsilon gradient matches finite differences") {
  const PinningProblem prob = chain_problem(6, trivial_cells(6));
  CounterRng rng(3, 0);
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::VectorXd v(6);
    for (int i = 0; i < 6; ++i) v[i] = rng.uniform(0, 0.5);
    const double mu = mhz_to_angular(2.3);
    Eigen::VectorXd g;
    const double e0 = prob.epsilon(v, mu, &g);
    REQUIRE(std::isfinite(e0));
    Eigen::VectorXd fd(6);
    const double h = 1e-6;
    for (int i = 0; i < 6; ++i) {
      Eigen::VectorXd p = v, m = v;
      p[i] += h;
      m[i] -= h;
      fd[i] = (prob.epsilon(p, mu) - prob.epsilon(m, mu)) / (2 * h);
    }
    CHECK((g - fd).cwiseAbs().maxCoeff() <= 1e-5 * fd.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("barrier values") {
  const PinningProblem prob = chain_problem(4, trivial_cells(4));
  const ModeSpectrum s = mode_spectrum(prob.hessian(Eigen::VectorXd::Zero(4)));
  CHECK(std::isinf(prob.epsilon(Eigen::VectorXd::Zero(4), s.frequencies[s.mode_count() - 1])));
  CHECK(std::isinf(prob.epsilon(Eigen::VectorXd::Constant(4, -100.0), mhz_to_angular(2.3))));
}

TEST_CASE("identity target is reached with zero pinning") {
  const SearchSpace space = small_space();
  const TrapConfig trap = trap_mhz(2, 1.2, 0.2, 5);
  const IonCrystal c = stage_crystal(trap, space.omega_z_min, ytterbium171(), GeometryModel::Equidistant);
  DriveConfig drive;
  drive.mu = space.mu_min;
  TargetSpec spec;
  spec.kind = TargetKind::Explicit;
  spec.matrix = coupling_matrix(mode_spectrum(build_hessian(c)), drive, ytterbium171());
  const Stage1Result r = stage1_search(spec, space, trap, ytterbium171());
  REQUIRE(!r.candidates.empty());
  CHECK(r.cells.at(0).constraints == 0);
  CHECK(r.candidates[0].epsilon < 1e-6);
  CHECK(r.candidates[0].curvature.cwiseAbs().maxCoeff() < 1e-3 * space.pin_max * space.pin_max);
  for (const auto& cand : r.candidates) CHECK(cand.curvature.minCoeff() >= 0.0);
}

TEST_CASE("every cell infeasible gives no candidates") {
  // Pinning along z cannot move the transverse couplings of a chain.
  SearchSpace space = small_space();
  space.pin_axes = AxisSet{Axis::Z};
  space.grid_mu = 2;
  space.mu_max = mhz_to_angular(2.5);
  const Stage1Result r = stage1_search(TargetSpec{}, space, trap_mhz(2, 1.2, 0.2, 5), ytterbium171());
  CHECK(r.candidates.empty());
  REQUIRE(r.cells.size() == 2);
  for (const auto& cell : r.cells) CHECK(cell.status == "infeasible");
}

TEST_CASE("stages keep the descent contract") {
  const SearchSpace space = small_space();
  const TrapConfig trap = trap_mhz(2, 1.2, 0.2, 6);
  const Stage1Result s1 = stage1_search(TargetSpec{}, space, trap, ytterbium171());
  REQUIRE(!s1.candidates.empty());
  for (std::size_t i = 1; i < s1.candidates.size(); ++i)
    CHECK(s1.candidates[i].epsilon >= s1.candidates[i - 1].epsilon);
  const Candidate& best = s1.candidates[0];

  StageRecord rec;
  const Candidate s2 = stage2_refine(best, TargetSpec{}, SymmetryGroup::None, space, trap, ytterbium171(), &rec);
  CHECK(s2.epsilon <= best.epsilon + 1e-12);
  for (std::size_t i = 1; i < rec.trace.size(); ++i) CHECK(rec.trace[i] <= rec.trace[i - 1]);

  const Candidate sym = stage2_refine(best, TargetSpec{}, SymmetryGroup::ReflectionZ, space, trap, ytterbium171());
  for (int i = 0; i < 3; ++i) CHECK(sym.curvature[i] == sym.curvature[5 - i]);

  const IonCrystal truth = stage_crystal(trap, best.omega_z, ytterbium171(), GeometryModel::Equilibrium);
  const PinningProblem warm(truth, build_target(TargetSpec{}, truth.positions), space.pin_axes, space.drive_axis,
                            space.pin_max * space.pin_max, space.resonance_guard, trivial_cells(6));
  const double warm_eps = warm.epsilon(s2.curvature / (space.pin_max * space.pin_max), s2.mu);
  const OptimizationResult r = stage3_finalize(s2, TargetSpec{}, SymmetryGroup::None, space, trap, ytterbium171());
  CHECK(r.epsilon <= warm_eps + 1e-12);
  CHECK(r.mu >= space.mu_min);
  CHECK(r.mu <= space.mu_max);
  CHECK(r.curvature.minCoeff() >= 0.0);
  CHECK(r.curvature.maxCoeff() <= space.pin_max * space.pin_max * (1 + 1e-12));
  for (std::size_t i = 1; i < r.stage3.trace.size(); ++i) CHECK(r.stage3.trace[i] <= r.stage3.trace[i - 1]);
}

TEST_CASE("pipeline is deterministic and beats the unpinned baseline") {
  SearchSpace space = small_space();
  space.mu_min = mhz_to_angular(2.1);
  space.mu_max = mhz_to_angular(2.5);
  space.grid_mu = 3;
  space.top_candidates = 2;
  const TrapConfig trap = trap_mhz(2, 1.2, 0.2, 6);
  const OptimizationResult a = run_pipeline(TargetSpec{}, space, trap, ytterbium171(), SymmetryGroup::ReflectionZ);
  const OptimizationResult b = run_pipeline(TargetSpec{}, space, trap, ytterbium171(), SymmetryGroup::ReflectionZ);
  CHECK(a.epsilon == b.epsilon);
  CHECK(a.mu == b.mu);
  CHECK(a.curvature == b.curvature);
  for (int i = 0; i < 3; ++i) CHECK(a.curvature[i] == doctest::Approx(a.curvature[5 - i]).epsilon(1e-12));

  const MuScan base = unpinned_mu_scan(a.crystal, a.target, space.drive_axis, space.mu_min, space.mu_max, 40);
  CHECK(a.epsilon < base.epsilon);
}
