#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tweezer/modes.hpp"
#include "tweezer/units.hpp"

namespace tweezer {

/// Symmetric N x N couplings (rad/s) with zero diagonal. Positive entries are
/// antiferromagnetic.
using CouplingMatrix = Eigen::MatrixXd;

struct DriveConfig {
  double mu = 0.0;  // beatnote, rad/s
  /// Drive strength (rad/s). When absent, couplings are reported in units of
  /// g^2 hbar k^2 / 2M, i.e. the prefactor is 1.
  std::optional<double> g;
  double k_eff = 0.0;  // rad/m
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  /// Modes entering the sum; empty means all.
  std::vector<bool> mode_mask;
  double resonance_guard = khz_to_angular(1.0);

  bool includes(int mode) const {
    return mode_mask.empty() || mode_mask.at(static_cast<std::size_t>(mode));
  }
};

void validate(const DriveConfig& drive);

/// g^2 hbar k^2 / 2M, or 1 when g is absent.
double coupling_prefactor(const DriveConfig& drive, const SpeciesConstants& species);

/// Throws resonance when mu sits within the guard of an included, drive-coupled mode.
void check_resonance(const ModeSpectrum& spectrum, const DriveConfig& drive);

/// Theta_m = 1/(mu^2 - lambda_m) for included modes, 0 otherwise.
Eigen::VectorXd detuning_weights(const ModeSpectrum& spectrum, const DriveConfig& drive);

CouplingMatrix coupling_matrix(const ModeSpectrum& spectrum, const DriveConfig& drive,
                               const SpeciesConstants& species);

/// g eta_j^(m) for included modes (zero columns elsewhere). Without g this is
/// B_jm / sqrt(omega_m), which keeps the residual amplitudes consistent with
/// the unit-prefactor couplings.
Eigen::MatrixXd drive_amplitudes(const ModeSpectrum& spectrum, const DriveConfig& drive,
                                 const SpeciesConstants& species);

/// gamma_j^(m)(t), N x 3N.
Eigen::MatrixXcd residual_displacement(const ModeSpectrum& spectrum, const DriveConfig& drive,
                                       const SpeciesConstants& species, double t);

/// beta_{j,k}(t) for the ordered pair (j, k). Grows as J_{j,k} t at long times.
double ising_phase(const ModeSpectrum& spectrum, const DriveConfig& drive, const SpeciesConstants& species,
                   int j, int k, double t);

struct CouplingError {
  double epsilon = 0.0;
  /// J rescaled so its largest-magnitude entry matches the target's.
  CouplingMatrix normalized;
  double scale = 0.0;
  /// Location of the entry that fixes the normalization (first in row-major order).
  int argmax_row = 0;
  int argmax_col = 0;
};

/// epsilon = ||J_T - s J||_F / ||J_T||_F with s = max|J_T| / max|J|.
CouplingError coupling_error(const CouplingMatrix& target, const CouplingMatrix& realized);

/// Symmetrizes and zeroes the diagonal.
CouplingMatrix clean_coupling(const Eigen::MatrixXd& m);

}  // namespace tweezer
