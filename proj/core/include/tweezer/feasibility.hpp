#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tweezer/coupling.hpp"
#include "tweezer/sensitivity.hpp"

namespace tweezer {

enum class PinningSign { Free, Nonnegative };

struct ConstraintProvenance {
  IonPair pair;
  int sign = 0;  // sign of J_T - normalized J_0 for that pair
};

/// Rows are sign(dJ_kl) times the gradient of J_kl over the pinning parameters.
struct SignConstraintSystem {
  Eigen::MatrixXd x;
  std::vector<ConstraintProvenance> provenance;

  int constraint_count() const { return static_cast<int>(x.rows()); }
};

/// Default zero band for dJ: 1e-3 max|J_T|.
double default_delta_tolerance(const CouplingMatrix& target);

/// `native` is normalized to the target's peak before differencing. Pairs with
/// |dJ| < tol_delta are dropped. Pass tol_delta < 0 for the default. Gradient
/// rows with infinity norm <= gradient_floor are set to exactly zero, so a pair
/// the pinning cannot move makes the system infeasible instead of amplifying
/// round-off under row normalization.
SignConstraintSystem build_sign_constraints(const CouplingMatrix& target, const CouplingMatrix& native,
                                            const CouplingGradient& gradients, const std::vector<IonPair>& selection,
                                            double tol_delta = -1.0, double gradient_floor = 0.0);

/// Gradient floor for couplings of size max|J| on a spectrum of scale omega_bar^2.
double default_gradient_floor(const CouplingMatrix& native, double reference_scale);

struct FeasibilityVerdict {
  bool feasible = false;
  /// Pinning direction with unit infinity norm (zero for an empty system).
  Eigen::VectorXd witness;
  /// Optimal margin t* on row-normalized constraints; +inf for an empty system.
  double margin = 0.0;
};

inline constexpr double kFeasibilityMargin = 1e-9;

/// max t  s.t.  X_hat w >= t, |w|_inf <= 1 (w >= 0 for nonnegative pinning),
/// where X_hat has rows scaled to unit infinity norm. Feasible iff t* > tol_margin.
FeasibilityVerdict feasibility_test(const SignConstraintSystem& system, PinningSign sign = PinningSign::Free,
                                    double tol_margin = kFeasibilityMargin);
FeasibilityVerdict feasibility_test(const Eigen::MatrixXd& x, PinningSign sign = PinningSign::Free,
                                    double tol_margin = kFeasibilityMargin);

}  // namespace tweezer
