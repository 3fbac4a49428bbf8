#include <map>

#include <benchmark/benchmark.h>

#include <tweezer/coupling.hpp>
#include <tweezer/crystal.hpp>
#include <tweezer/feasibility.hpp>
#include <tweezer/modes.hpp>
#include <tweezer/optimizer.hpp>
#include <tweezer/rng.hpp>
#include <tweezer/sensitivity.hpp>
#include <tweezer/targets.hpp>

using namespace tweezer;

namespace {

// Ground-state chain in a (2, 0.6, 0.07) MHz trap, x-driven near the top of the transverse band.
struct Chain {
  IonCrystal crystal;
  ModeSpectrum spectrum;
  DriveConfig drive;
  CouplingMatrix target;

  explicit Chain(int n) {
    TrapConfig trap;
    trap.omega = {mhz_to_angular(2.0), mhz_to_angular(0.6), mhz_to_angular(0.07)};
    trap.ion_count = n;
    crystal = solve_ground_state(trap, ytterbium171(), 1, 0);
    spectrum = mode_spectrum(build_hessian(crystal));
    drive.mu = spectrum.frequencies[spectrum.mode_count() - 1] * 1.02;
    drive.axis = Eigen::Vector3d::UnitX();
    target = build_target(TargetSpec{}, crystal.positions);
  }
};

const Chain& chain(int n) {
  static std::map<int, Chain> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Chain(n)).first;
  return it->second;
}

void BM_HessianAndSpectrum(benchmark::State& state) {
  const Chain& c = chain(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mode_spectrum(build_hessian(c.crystal)));
}
BENCHMARK(BM_HessianAndSpectrum)->Arg(6)->Arg(12)->Arg(16);

void BM_CouplingMatrix(benchmark::State& state) {
  const Chain& c = chain(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(coupling_matrix(c.spectrum, c.drive, c.crystal.species));
}
BENCHMARK(BM_CouplingMatrix)->Arg(6)->Arg(12)->Arg(16);

void BM_AdjointGradientAllPairs(benchmark::State& state) {
  const Chain& c = chain(int(state.range(0)));
  const auto pairs = all_pairs(c.crystal.ion_count());
  for (auto _ : state)
    benchmark::DoNotOptimize(coupling_gradient_adjoint(c.spectrum, c.drive, c.crystal.species, pairs));
}
BENCHMARK(BM_AdjointGradientAllPairs)->Arg(6)->Arg(12);

void BM_CouplingVjp(benchmark::State& state) {
  const Chain& c = chain(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(coupling_vjp(c.spectrum, c.drive, c.crystal.species, c.target));
}
BENCHMARK(BM_CouplingVjp)->Arg(6)->Arg(12)->Arg(16);

void BM_FeasibilityLp(benchmark::State& state) {
  const int rows = int(state.range(0)), cols = int(state.range(1));
  CounterRng rng(5, 0);
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(feasibility_test(x));
}
BENCHMARK(BM_FeasibilityLp)->Args({11, 12})->Args({66, 12})->Args({42, 19});

void BM_EpsilonWithGradient(benchmark::State& state) {
  const Chain& c = chain(int(state.range(0)));
  const int n = c.crystal.ion_count();
  const PinningProblem prob(c.crystal, c.target, AxisSet{Axis::X}, c.drive.axis, mhz_to_angular(0.5) * mhz_to_angular(0.5),
                            khz_to_angular(1.0), trivial_cells(n));
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 0.01);
  Eigen::VectorXd grad;
  for (auto _ : state) benchmark::DoNotOptimize(prob.epsilon(v, c.drive.mu, &grad));
}
BENCHMARK(BM_EpsilonWithGradient)->Arg(6)->Arg(12)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
