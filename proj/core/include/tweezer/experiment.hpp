#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tweezer/optimizer.hpp"
#include "tweezer/units.hpp"

namespace tweezer {

struct TweezerBeam {
  double power = 0.0;       // W
  double waist = 0.0;       // m
  double wavelength = 0.0;  // m
  std::string polarization = "linear";
};

void validate(const TweezerBeam& beam);

/// Dipole transition used in the multi-line polarizability sum. `weight` is
/// the fraction of the ground-state oscillator strength carried by the line.
struct AtomicLine {
  std::string label;
  double omega0 = 0.0;     // rad/s
  double linewidth = 0.0;  // rad/s
  double weight = 1.0;
};

struct AtomicLines {
  std::vector<AtomicLine> lines;
  double hyperfine_splitting = 0.0;  // rad/s
};

void validate(const AtomicLines& lines);

/// D1 (369.5 nm) and D2 (328.9 nm) of Yb+ with weights 1/3 and 2/3 and the
/// 12.6 GHz ground-state hyperfine splitting.
AtomicLines ytterbium171_lines();

/// Lines "label wavelength_nm linewidth_MHz [weight]"; '#' starts a comment.
/// Linewidths are Gamma/2pi.
AtomicLines load_atomic_lines(const std::filesystem::path& path, double hyperfine_splitting);

double peak_intensity(const TweezerBeam& beam);

/// Light shift at the focus (J); negative for red detuning.
double dipole_potential(const TweezerBeam& beam, const AtomicLines& lines, const PhysicalConstants& k = {});

/// Photon scattering rate at the focus (1/s), summed over lines.
double scattering_rate(const TweezerBeam& beam, const AtomicLines& lines, const PhysicalConstants& k = {});

/// Signed curvature of the Gaussian focus, 4 U0 / (M w^2) with a sign flip so
/// red detuning confines (rad^2/s^2).
double tweezer_curvature(const TweezerBeam& beam, const AtomicLines& lines, const SpeciesConstants& species);

/// sqrt|curvature| (rad/s).
double tweezer_trap_frequency(const TweezerBeam& beam, const AtomicLines& lines, const SpeciesConstants& species);

/// Differential shift between the hyperfine clock states (rad/s): each line's
/// shift times omega_HF / Delta_eff with 1/Delta_eff = d ln(1/Delta + 1/Sigma) / d omega0.
double differential_stark_shift(const TweezerBeam& beam, const AtomicLines& lines, const PhysicalConstants& k = {});

/// Per-ion beams with P/w^2 equal to the reference and trap frequency equal to
/// desired[i] (rad/s). Zero or negative requests are unsupported.
std::vector<TweezerBeam> stark_homogenize(std::span<const double> desired, const TweezerBeam& reference,
                                          const AtomicLines& lines, const SpeciesConstants& species);

struct MisalignmentOptions {
  /// Per-sample radius of the offset ball, drawn log-uniformly from [min, max] (m).
  double scale_min = 0.0;
  double scale_max = 0.0;
  int samples = 1000;
  std::uint64_t seed = 1;
  /// Axes of the random offsets; empty means the result's pinning axes.
  AxisSet axes{};
  int threads = 1;
};

struct MisalignmentSample {
  double scale = 0.0;        // m
  double mean_offset = 0.0;  // m
  double epsilon = 0.0;
  bool converged = true;
};

struct MisalignmentScan {
  double aligned_epsilon = 0.0;
  std::vector<MisalignmentSample> samples;
  int excluded = 0;
};

/// Monte Carlo over displaced tweezer centers: re-solves the equilibrium with
/// the offset tweezers, rebuilds the spectrum and recomputes epsilon against
/// the result's target at its beatnote.
MisalignmentScan misalignment_scan(const OptimizationResult& result, const MisalignmentOptions& options);

/// Epsilon of a configuration with tweezers centered on the given equilibrium.
double configuration_epsilon(const IonCrystal& crystal, const TweezerPattern& tweezers, const DriveConfig& drive,
                             const CouplingMatrix& target);

}  // namespace tweezer
