#pragma once

#include <cmath>

#include <tweezer/crystal.hpp>
#include <tweezer/rng.hpp>

namespace testing {

inline tweezer::TrapConfig trap_mhz(double fx, double fy, double fz, int n) {
  tweezer::TrapConfig t;
  t.omega = {tweezer::mhz_to_angular(fx), tweezer::mhz_to_angular(fy), tweezer::mhz_to_angular(fz)};
  t.ion_count = n;
  return t;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Random chain-like crystal in a loose trap: true equilibrium of a random trap.
inline tweezer::IonCrystal random_chain(int n, std::uint64_t seed) {
  tweezer::CounterRng rng(seed, 99);
  const double fz = rng.uniform(0.1, 0.3);
  auto trap = trap_mhz(rng.uniform(1.5, 2.5), rng.uniform(1.0, 1.4), fz, n);
  return tweezer::solve_ground_state(trap, tweezer::ytterbium171(), seed, 0);
}

}  // namespace testing
