#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tweezer {

/// Returns f(x) and, when `grad` is non-null, writes the gradient. A value of
/// +inf marks an inadmissible point; line searches back away from it.
using BoxObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

enum class LineSearchKind { Backtracking, StrongWolfe };

struct LbfgsbOptions {
  int memory = 10;
  int max_iterations = 2000;
  /// Stop when an accepted step changes f by less than this.
  double f_tolerance = 1e-10;
  /// Stop when the projected gradient infinity norm falls below this.
  double pg_tolerance = 1e-8;
  LineSearchKind line_search = LineSearchKind::Backtracking;
  int max_line_steps = 40;
};

struct LbfgsbResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string reason;
  /// f at the start and after every accepted step; non-increasing.
  std::vector<double> trace;
};

/// Projected limited-memory BFGS on the box lower <= x <= upper. Curvature
/// pairs act on the free variables only; steps follow the projected path.
LbfgsbResult minimize_box(const BoxObjective& objective, const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                          const Eigen::VectorXd& upper, const LbfgsbOptions& options = {});

}  // namespace tweezer
