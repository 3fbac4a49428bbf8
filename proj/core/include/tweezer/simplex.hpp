#pragma once

#include <Eigen/Dense>

namespace tweezer {

enum class LpStatus { Optimal, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
};

/// Dense primal simplex for  max c^T x  s.t.  A x <= b,  x >= 0,  with b >= 0
/// so the slack basis is feasible. Bland's rule prevents cycling.
LpResult maximize_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                     int max_iterations = 100000);

}  // namespace tweezer
