#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "tweezer/error.hpp"
#include "tweezer/tweezer_pattern.hpp"
#include "tweezer/units.hpp"

namespace tweezer {

/// Harmonic Paul-trap pseudopotential, angular frequencies in rad/s.
struct TrapConfig {
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();
  int ion_count = 0;

  /// Geometric mean of the three trap frequencies.
  double mean_frequency() const { return std::cbrt(omega.prod()); }
};

void validate(const TrapConfig& trap);

enum class Dimensionality { Chain, Planar };

struct IonCrystal {
  TrapConfig trap;
  SpeciesConstants species;
  Positions positions;
  Dimensionality dimensionality = Dimensionality::Chain;

  int ion_count() const { return static_cast<int>(positions.rows()); }
  /// Coulomb length at the geometric-mean trap frequency.
  double length_scale() const { return coulomb_length(trap.mean_frequency(), species); }
};

/// Minimum spacing of an N-ion chain in a harmonic well of frequency omega,
/// used as the lattice constant of the idealized equidistant chain.
double equidistant_spacing(double omega_z_eff, int ion_count, const SpeciesConstants& species);

struct PotentialEvaluation {
  double energy = 0.0;  // J
  Positions gradient;   // J/m
};

/// Trap + tweezer + Coulomb energy and its analytic gradient.
/// Tweezers without anchors are centered and contribute nothing here.
PotentialEvaluation potential_and_gradient(const Positions& positions, const TrapConfig& trap,
                                           const SpeciesConstants& species,
                                           const TweezerPattern* tweezers = nullptr);

/// Full 3N x 3N second-derivative matrix of the potential (J/m^2), ion-major
/// ordering (x0, y0, z0, x1, ...). Anchors are irrelevant for the curvature.
Eigen::MatrixXd potential_hessian(const Positions& positions, const TrapConfig& trap,
                                  const SpeciesConstants& species,
                                  const TweezerPattern* tweezers = nullptr);

struct EquilibriumOptions {
  /// Force tolerance in units of M wbar^2 l.
  double tolerance = 1e-10;
  int max_iterations = 5000;
  /// Minimum pairwise distance (units of l) allowed during iterations.
  double min_separation = 1e-3;
};

/// Damped Newton on grad V = 0 with steepest-descent fallback on indefinite
/// curvature. The returned crystal is tagged Chain when all ions lie on the
/// weakest trap axis, otherwise Planar; planar crystals must lie in the plane
/// of the two weakest axes (non-planar error otherwise) unless anchored
/// tweezers are present.
IonCrystal solve_equilibrium(const TrapConfig& trap, const SpeciesConstants& species,
                             const Positions& initial_guess,
                             const TweezerPattern* tweezers = nullptr,
                             const EquilibriumOptions& options = {});

enum class LatticeKind { Chain, Triangular };

/// Initial-guess geometries. Chains lie along z, centered on the origin;
/// triangular lattices are centered hexagonal patches (N = 1, 7, 19, 37, ...)
/// in the plane orthogonal to `normal`.
Positions make_lattice(LatticeKind kind, int ion_count, double spacing, Axis normal = Axis::X);

/// Number of sites in a centered hexagonal patch with `shells` rings.
constexpr int hexagonal_count(int shells) { return 1 + 3 * shells * (shells + 1); }

/// Lowest-energy stable equilibrium over a deterministic set of initial
/// guesses (chain, hexagonal patch when N fits, seeded random planar guesses).
IonCrystal solve_ground_state(const TrapConfig& trap, const SpeciesConstants& species,
                              std::uint64_t seed = 1, int random_restarts = 6);

/// Positions of `crystal` mirrored through the origin along `axis`.
Positions reflect(const Positions& positions, Axis axis);

/// Smallest pairwise distance (m).
double min_pair_distance(const Positions& positions);

}  // namespace tweezer
