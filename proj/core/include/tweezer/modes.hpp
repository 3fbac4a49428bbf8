#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tweezer/crystal.hpp"
#include "tweezer/tweezer_pattern.hpp"

namespace tweezer {

/// Mass-scaled Hessian A = (1/M) grad^2 V (rad^2/s^2), ion-major ordering.
struct HessianMatrix {
  Eigen::MatrixXd a;
  /// Squared geometric-mean trap frequency; sets the absolute tolerances.
  double reference_scale = 0.0;

  int ion_count() const { return static_cast<int>(a.rows() / 3); }
};

HessianMatrix build_hessian(const IonCrystal& crystal, const TweezerPattern& tweezers);
HessianMatrix build_hessian(const IonCrystal& crystal);

/// Normal modes sorted by ascending eigenvalue. Column m of `vectors` is b_m.
struct ModeSpectrum {
  Eigen::VectorXd eigenvalues;  // rad^2/s^2
  Eigen::VectorXd frequencies;  // rad/s, sqrt(max(lambda, 0))
  Eigen::MatrixXd vectors;
  /// Row m holds the fraction of |b_m|^2 on the x, y and z components.
  Eigen::MatrixX3d direction_weights;
  double reference_scale = 0.0;

  int mode_count() const { return static_cast<int>(eigenvalues.size()); }
  int ion_count() const { return mode_count() / 3; }
};

/// Absolute floor below which an eigenvalue marks the crystal as unstable.
inline double psd_tolerance(double reference_scale) { return 1e-6 * reference_scale; }
/// Eigenvalues closer than this are treated as degenerate.
inline double degeneracy_tolerance(double reference_scale) { return 1e-9 * reference_scale; }

/// Eigendecomposition with deterministic gauge: degenerate subspaces are
/// rebuilt by Gram-Schmidt on the canonical basis and every vector has its
/// largest-magnitude component positive. Throws unstable-crystal below the
/// PSD floor.
ModeSpectrum mode_spectrum(const HessianMatrix& hessian);

/// Modes with at least `threshold` of their weight on `axes`.
std::vector<bool> modes_along(const ModeSpectrum& spectrum, AxisSet axes, double threshold = 0.99);

/// B_jm = drive_axis . (displacement of ion j in mode m), an N x 3N matrix.
Eigen::MatrixXd drive_projection(const ModeSpectrum& spectrum, const Eigen::Vector3d& drive_axis);

/// eta_j^(m) = k_eff B_jm sqrt(hbar / 2 M omega_m). Modes with no weight on the
/// drive axis give zero columns; a coupled zero-frequency mode is a division-guard error.
Eigen::MatrixXd lamb_dicke(const ModeSpectrum& spectrum, double k_eff, const Eigen::Vector3d& drive_axis,
                           const SpeciesConstants& species);

/// Single-mode convenience: k sqrt(hbar / 2 M omega).
double lamb_dicke_scale(double k_eff, double omega, const SpeciesConstants& species);

}  // namespace tweezer
