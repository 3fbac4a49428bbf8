#include <doctest.h>

#include <cmath>
#include <fstream>

#include <tweezer/experiment.hpp>

#include "helpers.hpp"

using namespace tweezer;
using testing::rel;
using testing::trap_mhz;

namespace {

TweezerBeam reference_beam() { return {1.0, um_to_m(1.0), nm_to_m(1070.0)}; }

}  // namespace

TEST_CASE("estimators at the reference beam") {
  const auto lines = ytterbium171_lines();
  const auto yb = ytterbium171();
  const TweezerBeam b = reference_beam();
  const double rate = scattering_rate(b, lines);
  CHECK(rate > 1.0);
  CHECK(rate < 4.0);
  const double omega = tweezer_trap_frequency(b, lines, yb);
  CHECK(omega / (2 * M_PI) > 100e3);
  CHECK(omega / (2 * M_PI) < 400e3);
  CHECK(dipole_potential(b, lines) < 0.0);
  CHECK(tweezer_curvature(b, lines, yb) > 0.0);
  CHECK(differential_stark_shift(b, lines) != 0.0);
}

TEST_CASE("estimator scalings") {
  const auto lines = ytterbium171_lines();
  const auto yb = ytterbium171();
  const TweezerBeam b = reference_beam();
  TweezerBeam p2 = b, w2 = b, far = b;
  p2.power *= 2;
  w2.waist *= 2;
  CHECK(rel(scattering_rate(p2, lines), 2 * scattering_rate(b, lines)) < 1e-12);
  CHECK(rel(tweezer_trap_frequency(p2, lines, yb), std::sqrt(2.0) * tweezer_trap_frequency(b, lines, yb)) < 1e-12);
  CHECK(rel(tweezer_trap_frequency(w2, lines, yb), tweezer_trap_frequency(b, lines, yb) / 4) < 1e-12);
  CHECK(rel(differential_stark_shift(p2, lines), 2 * differential_stark_shift(b, lines)) < 1e-12);
  CHECK(rel(differential_stark_shift(w2, lines), differential_stark_shift(b, lines) / 4) < 1e-12);
  double last = scattering_rate(b, lines);
  for (int k = 1; k <= 10; ++k) {
    far.wavelength = b.wavelength * (1 + k);
    const double r = scattering_rate(far, lines);
    CHECK(r < last);
    last = r;
  }
}

TEST_CASE("near-resonant and invalid beams") {
  const auto lines = ytterbium171_lines();
  TweezerBeam b = reference_beam();
  b.wavelength = 2 * M_PI * PhysicalConstants{}.speed_of_light / (lines.lines[0].omega0 + 2 * lines.lines[0].linewidth);
  CHECK_THROWS_AS(scattering_rate(b, lines), Error);
  b = reference_beam();
  b.power = -1;
  CHECK_THROWS_AS(validate(b), Error);
}

TEST_CASE("Stark homogenization") {
  const auto lines = ytterbium171_lines();
  const auto yb = ytterbium171();
  const TweezerBeam ref = reference_beam();
  const double w0 = tweezer_trap_frequency(ref, lines, yb);
  const std::vector<double> desired{w0, w0 / 2, 1.7 * w0};
  const auto beams = stark_homogenize(desired, ref, lines, yb);
  CHECK(rel(beams[0].power, ref.power) < 1e-12);
  CHECK(rel(beams[0].waist, ref.waist) < 1e-12);
  CHECK(rel(beams[1].waist, 2 * ref.waist) < 1e-12);
  CHECK(rel(beams[1].power, 4 * ref.power) < 1e-12);
  for (std::size_t i = 0; i < beams.size(); ++i) {
    CHECK(rel(beams[i].power / std::pow(beams[i].waist, 2), ref.power / std::pow(ref.waist, 2)) < 1e-12);
    CHECK(rel(tweezer_trap_frequency(beams[i], lines, yb), desired[i]) < 1e-6);
    CHECK(rel(differential_stark_shift(beams[i], lines), differential_stark_shift(ref, lines)) < 1e-9);
  }
  const std::vector<double> zero{0.0};
  CHECK_THROWS_AS(stark_homogenize(zero, ref, lines, yb), Error);
}

TEST_CASE("atomic lines file") {
  const std::string path = "tweezer_test_lines.txt";
  {
    std::ofstream out(path);
    out << "# label nm MHz weight\nD1 369.5 19.6 0.3333333333333333\nD2 328.9 25.8 0.6666666666666666\n";
  }
  const AtomicLines loaded = load_atomic_lines(path, 2 * M_PI * 12.6e9);
  std::remove(path.c_str());
  REQUIRE(loaded.lines.size() == 2);
  const AtomicLines ref = ytterbium171_lines();
  CHECK(rel(scattering_rate(reference_beam(), loaded), scattering_rate(reference_beam(), ref)) < 1e-6);
}

namespace {

OptimizationResult small_result() {
  OptimizationResult r;
  r.crystal = solve_ground_state(trap_mhz(2, 1.2, 0.2, 4), ytterbium171(), 1, 0);
  const double k = std::pow(mhz_to_angular(0.3), 2);
  const std::vector<double> curv{k, 0.2 * k, 0.5 * k, k};
  r.tweezers = TweezerPattern::on_axes(curv, AxisSet{Axis::X});
  r.pin_axes = AxisSet{Axis::X};
  r.drive.mu = mhz_to_angular(2.2);
  r.target = build_target(TargetSpec{}, r.crystal.positions);
  return r;
}

}  // namespace

TEST_CASE("misalignment scan") {
  const OptimizationResult r = small_result();
  MisalignmentOptions zero;
  zero.samples = 5;
  const auto z = misalignment_scan(r, zero);
  CHECK(z.aligned_epsilon == configuration_epsilon(r.crystal, r.tweezers, r.drive, r.target));
  for (const auto& s : z.samples) CHECK(s.epsilon == z.aligned_epsilon);

  MisalignmentOptions opt;
  opt.scale_min = nm_to_m(1);
  opt.scale_max = nm_to_m(100);
  opt.samples = 20;
  opt.seed = 9;
  const auto a = misalignment_scan(r, opt);
  opt.threads = 3;
  const auto b = misalignment_scan(r, opt);
  REQUIRE(a.samples.size() == 20);
  CHECK(a.excluded == 0);
  bool changed = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].epsilon == b.samples[i].epsilon);
    CHECK(a.samples[i].mean_offset <= a.samples[i].scale);
    changed = changed || a.samples[i].epsilon != a.aligned_epsilon;
  }
  CHECK(changed);

  OptimizationResult ideal = r;
  ideal.crystal = stage_crystal(trap_mhz(2, 1.2, 0.2, 4), mhz_to_angular(0.2), ytterbium171(),
                                GeometryModel::Equidistant);
  CHECK_THROWS_AS(misalignment_scan(ideal, opt), Error);
}

TEST_CASE("offset tweezers displace ions to first order") {
  const OptimizationResult r = small_result();
  const IonCrystal& c = r.crystal;
  TweezerPattern p = r.tweezers;
  p.anchors = c.positions;
  p.offsets.assign(4, Eigen::Vector3d::Zero());
  const Eigen::Vector3d delta(nm_to_m(5), 0, 0);
  p.offsets[1] = delta;
  const IonCrystal shifted = solve_equilibrium(c.trap, c.species, c.positions, &p);
  const Eigen::MatrixXd a = build_hessian(c, r.tweezers).a;
  Eigen::VectorXd force = Eigen::VectorXd::Zero(12);
  force.segment<3>(3) = r.tweezers.curvature[1] * delta;
  const Eigen::VectorXd predicted = a.ldlt().solve(force);
  Eigen::VectorXd actual(12);
  for (int i = 0; i < 4; ++i) actual.segment<3>(3 * i) = (shifted.positions.row(i) - c.positions.row(i)).transpose();
  CHECK((actual - predicted).norm() < 0.1 * predicted.norm());
  CHECK(predicted.norm() > 0.0);
}
