#pragma once

#include <cmath>
#include <numbers>

namespace tweezer {

/// CODATA 2018 values, SI.
struct PhysicalConstants {
  double hbar = 1.054571817e-34;       // J s
  double epsilon0 = 8.8541878128e-12;  // F/m
  double elementary_charge = 1.602176634e-19;  // C
  double speed_of_light = 299792458.0;         // m/s
};

inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SpeciesConstants {
  double mass = 0.0;    // kg
  double charge = 0.0;  // C
  PhysicalConstants constants{};

  /// e^2 / (4 pi eps0) for this species' charge, J m.
  double coulomb_constant() const {
    return charge * charge / (4.0 * std::numbers::pi * constants.epsilon0);
  }
};

/// Throws invalid-argument unless mass and charge are positive.
void validate(const SpeciesConstants& species);

inline SpeciesConstants ytterbium171() {
  return SpeciesConstants{170.936323 * kAtomicMassUnit, PhysicalConstants{}.elementary_charge, {}};
}

// I/O boundary helpers: frequencies are quoted as omega/2pi in MHz.
inline constexpr double mhz_to_angular(double f_mhz) { return kTwoPi * 1e6 * f_mhz; }
inline constexpr double angular_to_mhz(double omega) { return omega / (kTwoPi * 1e6); }
inline constexpr double khz_to_angular(double f_khz) { return kTwoPi * 1e3 * f_khz; }
inline constexpr double um_to_m(double um) { return um * 1e-6; }
inline constexpr double nm_to_m(double nm) { return nm * 1e-9; }

/// Characteristic Coulomb length (e^2 / 4 pi eps0 M omega^2)^(1/3).
inline double coulomb_length(double omega, const SpeciesConstants& species) {
  return std::cbrt(species.coulomb_constant() / (species.mass * omega * omega));
}

}  // namespace tweezer
