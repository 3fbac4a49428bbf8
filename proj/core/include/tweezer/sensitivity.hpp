#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tweezer/coupling.hpp"
#include "tweezer/modes.hpp"

namespace tweezer {

using IonPair = std::pair<int, int>;

/// Row r holds dJ_{k,l}/dA_pp for pairs[r] = (k, l), over the 3N diagonal
/// entries (or N per-ion pinning parameters after reduce_to_ions). Units: s.
struct CouplingGradient {
  std::vector<IonPair> pairs;
  Eigen::MatrixXd rows;
};

/// All pairs k < l.
std::vector<IonPair> all_pairs(int ion_count);

/// Adjoint gradient of selected couplings with respect to the Hessian diagonal,
/// via first-order eigen-perturbation of the mode sum. Throws degeneracy when an
/// included mode is degenerate with an excluded, drive-coupled one.
CouplingGradient coupling_gradient_adjoint(const ModeSpectrum& spectrum, const DriveConfig& drive,
                                           const SpeciesConstants& species, const std::vector<IonPair>& pairs);

/// Vector-Jacobian product: sum_{k,l} G_kl dJ_kl/dA_pp for every p. G is
/// symmetrized and its diagonal ignored, matching the zeroed diagonal of J.
Eigen::VectorXd coupling_vjp(const ModeSpectrum& spectrum, const DriveConfig& drive, const SpeciesConstants& species,
                             const Eigen::MatrixXd& g);

/// Sums the columns of each ion over `axes`: the gradient with respect to a
/// scalar curvature applied isotropically on those axes.
CouplingGradient reduce_to_ions(const CouplingGradient& gradient, AxisSet axes);
Eigen::VectorXd reduce_to_ions(const Eigen::VectorXd& diagonal_gradient, AxisSet axes);

using CouplingBuilder = std::function<CouplingMatrix(const Eigen::VectorXd&)>;

/// Central differences of the requested couplings with respect to each
/// parameter of `builder`.
CouplingGradient coupling_gradient_fd(const CouplingBuilder& builder, const Eigen::VectorXd& base, double step,
                                      const std::vector<IonPair>& pairs);

}  // namespace tweezer
