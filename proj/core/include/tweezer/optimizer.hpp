#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tweezer/coupling.hpp"
#include "tweezer/crystal.hpp"
#include "tweezer/feasibility.hpp"
#include "tweezer/lbfgsb.hpp"
#include "tweezer/modes.hpp"
#include "tweezer/symmetry.hpp"
#include "tweezer/targets.hpp"

namespace tweezer {

/// How the crystal is modeled for a stage. `Auto` uses the equidistant chain
/// when the trap's ground state is a chain and the true equilibrium otherwise.
enum class GeometryModel { Auto, Equidistant, Equilibrium };

/// Pairs that contribute feasibility rows: nonzero target entries, every pair,
/// or nearest neighbours of the stage crystal.
enum class PairSelection { TargetEdges, All, NearestNeighbor };

/// Box bounds and settings for the three-stage search. Frequencies in rad/s;
/// pinning bounds are signed frequencies sign(K) sqrt|K| of the curvature K.
struct SearchSpace {
  double omega_z_min = 0.0, omega_z_max = 0.0;
  double mu_min = 0.0, mu_max = 0.0;
  double pin_min = 0.0, pin_max = 0.0;
  double resonance_guard = khz_to_angular(1.0);
  AxisSet pin_axes{Axis::X};
  Eigen::Vector3d drive_axis = Eigen::Vector3d::UnitX();

  int grid_omega_z = 12;
  int grid_mu = 24;
  int restarts = 8;
  std::uint64_t seed = 1;
  int top_candidates = 3;
  int threads = 1;

  bool feasibility_filter = true;
  PinningSign pinning_sign = PinningSign::Free;
  PairSelection constraint_pairs = PairSelection::TargetEdges;

  GeometryModel stage1_geometry = GeometryModel::Auto;
  GeometryModel final_geometry = GeometryModel::Equilibrium;
  bool optimize_mu_in_stage3 = true;
  LbfgsbOptions minimizer{};
};

/// Throws invalid-argument on inconsistent bounds.
void validate(const SearchSpace& space);

/// Evenly spaced grid including both ends (a single point when min == max or count == 1).
std::vector<double> linear_grid(double lo, double hi, int count);

/// epsilon as a function of scaled per-parameter curvatures v (K = v * scale on
/// every pinned axis of the ions in each parameter's orbit) and the beatnote.
class PinningProblem {
 public:
  PinningProblem(IonCrystal crystal, CouplingMatrix target, AxisSet pin_axes, Eigen::Vector3d drive_axis,
                 double curvature_scale, double resonance_guard, SymmetryCells cells);

  int parameter_count() const { return cells_.orbit_count(); }
  const IonCrystal& crystal() const { return crystal_; }
  const CouplingMatrix& target() const { return target_; }
  const SymmetryCells& cells() const { return cells_; }
  double curvature_scale() const { return scale_; }
  AxisSet pin_axes() const { return axes_; }

  DriveConfig drive(double mu) const;
  /// Per-ion curvature (rad^2/s^2) for parameters v.
  Eigen::VectorXd curvature(const Eigen::VectorXd& v) const;
  TweezerPattern pattern(const Eigen::VectorXd& v) const;
  HessianMatrix hessian(const Eigen::VectorXd& v) const;

  /// epsilon and optional gradient with respect to v; +inf when the crystal is
  /// unstable or mu violates the resonance guard.
  double epsilon(const Eigen::VectorXd& v, double mu, Eigen::VectorXd* grad = nullptr) const;

  /// Realized couplings (unit prefactor) and spectrum; throws on failure.
  std::pair<CouplingMatrix, ModeSpectrum> realize(const Eigen::VectorXd& v, double mu) const;

 private:
  IonCrystal crystal_;
  CouplingMatrix target_;
  AxisSet axes_;
  Eigen::Vector3d drive_axis_;
  double scale_;
  double guard_;
  SymmetryCells cells_;
  Eigen::MatrixXd base_;
};

/// Per-cell record of the stage-1 pre-scan.
struct CellReport {
  double omega_z = 0.0;
  double mu = 0.0;
  std::string status;  // "feasible", "infeasible", "resonant", "unstable", "skipped-filter-off"
  bool feasible = false;
  double margin = 0.0;
  int constraints = 0;
  double epsilon = std::numeric_limits<double>::quiet_NaN();
};

struct Candidate {
  double omega_z = 0.0;
  double mu = 0.0;
  Eigen::VectorXd curvature;  // per ion, rad^2/s^2
  double epsilon = 0.0;
};

struct StageRecord {
  std::vector<double> trace;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  double seconds = 0.0;
  std::string note;
};

struct Stage1Result {
  std::vector<Candidate> candidates;  // sorted by (epsilon, omega_z, mu, curvature)
  std::vector<CellReport> cells;
  StageRecord record;
};

struct OptimizationResult {
  double omega_z = 0.0;
  double mu = 0.0;
  Eigen::VectorXd curvature;  // per ion, rad^2/s^2
  Eigen::VectorXd pinning;    // per ion signed frequency, rad/s
  double epsilon = 0.0;
  bool converged = false;

  IonCrystal crystal;
  TweezerPattern tweezers;
  DriveConfig drive;
  TargetSpec target_spec;
  CouplingMatrix target;
  CouplingMatrix realized;  // unit prefactor
  CouplingMatrix normalized;
  ModeSpectrum spectrum;
  AxisSet pin_axes;
  SymmetryCells cells;

  std::vector<CellReport> grid;
  StageRecord stage1, stage2, stage3;
  double seconds = 0.0;
};

/// Crystal used for a stage at axial frequency omega_z (other trap axes from the template).
IonCrystal stage_crystal(const TrapConfig& trap_template, double omega_z, const SpeciesConstants& species,
                         GeometryModel model, std::uint64_t seed = 1);

/// Grid pre-scan with feasibility filter and multi-start minimization over per-ion pinning.
Stage1Result stage1_search(const TargetSpec& target, const SearchSpace& space, const TrapConfig& trap_template,
                           const SpeciesConstants& species);

/// Pinning-only refinement with one value per symmetry orbit; omega_z and mu frozen.
Candidate stage2_refine(const Candidate& candidate, const TargetSpec& target, SymmetryGroup group,
                        const SearchSpace& space, const TrapConfig& trap_template, const SpeciesConstants& species,
                        StageRecord* record = nullptr);

/// True-trap re-optimization of {mu, pinning} from the warm start.
OptimizationResult stage3_finalize(const Candidate& candidate, const TargetSpec& target, SymmetryGroup group,
                                   const SearchSpace& space, const TrapConfig& trap_template,
                                   const SpeciesConstants& species);

/// stage1 -> stage2 -> stage3 over the best `top_candidates` stage-1 candidates.
OptimizationResult run_pipeline(const TargetSpec& target, const SearchSpace& space, const TrapConfig& trap_template,
                                const SpeciesConstants& species, SymmetryGroup group = SymmetryGroup::None);

struct MuScan {
  double mu = 0.0;
  double epsilon = std::numeric_limits<double>::infinity();
  std::vector<double> mus, epsilons;
};

/// Tweezer-free baseline: epsilon over a mu grid (resonant points are +inf),
/// followed by a golden-section polish around the best grid point.
MuScan unpinned_mu_scan(const IonCrystal& crystal, const CouplingMatrix& target, const Eigen::Vector3d& drive_axis,
                        double mu_min, double mu_max, int points, double resonance_guard = khz_to_angular(1.0));

}  // namespace tweezer
